import math
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from ontobench.state import ket_make  # noqa: E402

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; printed in the terminal summary."""
    name = request.node.get_closest_marker("criterion").args[0]
    entry = {"detail": ""}
    yield entry
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    _CRITERIA.append((name, passed, entry["detail"]))


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))


S3 = 1 / math.sqrt(3)
S6 = 1 / math.sqrt(6)
S12 = 1 / math.sqrt(12)

MODES = ["a", "b", "c", "u+", "v-", "x'"]

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
amplitudes = st.builds(complex, finite, finite).filter(lambda z: abs(z) > 1e-3)


@st.composite
def kets(draw, slots=None, normalize=True, max_terms=6):
    n = draw(st.integers(1, 3)) if slots is None else slots
    label = st.tuples(*[st.sampled_from(MODES)] * n)
    terms = draw(st.dictionaries(label, amplitudes, min_size=1, max_size=max_terms))
    return ket_make(n, terms.items(), normalize=normalize)
