import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import S3, S12, kets
from ontobench.notation import (ParseError, compile_and_run, format_ket, parse_bench, parse_ket,
                                parse_ket_expr)
from ontobench.scenarios import data_text
from ontobench.state import basis, equal_exact, equal_up_to_phase, ket_make, zero

R2 = 1 / math.sqrt(2)
HARDY = data_text("hardy.bench")

MINIMAL = "slots 1\nslot 1 modes a b\nstate |a>\n"


class TestParseKet:
    def test_entangled_paths(self):
        k = parse_ket("(|a,b> + |c,d>)/sqrt(2)")
        assert equal_exact(k, ket_make(2, [(("a", "b"), R2), (("c", "d"), R2)]), 1e-15)

    def test_imaginary_coefficients(self):
        k = parse_ket("(i|u+,v-> + |v+,v-> + i|v+,u->)/sqrt(3)")
        assert k[("u+", "v-")] == pytest.approx(1j * S3, abs=1e-15)
        assert k[("v+", "v-")] == pytest.approx(S3, abs=1e-15)

    def test_complex_pair_and_sign(self):
        k = parse_ket("-3|c+,c-> + (0,1)|c+,d-> + i|d+,c-> - |d+,d->", )
        k = k.scaled(S12)
        assert k.norm_squared == pytest.approx(1.0, abs=1e-15)
        assert k[("c+", "d-")] == pytest.approx(1j * S12, abs=1e-15)

    @pytest.mark.parametrize("text, expected", [
        ("-|a> + |b>", {"a": -1, "b": 1}),
        ("-(|a> + |b>)", {"a": -1, "b": -1}),
        ("-(0,1)|a> + |b>", {"a": -1j, "b": 1}),
        ("-2i|a> - |b>", {"a": -2j, "b": -1}),
    ])
    def test_leading_sign_scope(self, text, expected):
        assert {l[0]: a for l, a in parse_ket(text).terms.items()} == expected

    def test_coefficient_forms(self):
        for text in ["2i|x>", "2*i|x>", "2 i|x>", "(0,2)|x>"]:
            assert parse_ket(text)[("x",)] == 2j

    def test_primed_labels(self):
        assert set(parse_ket("|u'+,v'->").terms) == {("u'+", "v'-")}

    def test_unclosed_ket_position(self):
        with pytest.raises(ParseError) as e:
            parse_ket("|a,b")
        assert (e.value.line, e.value.col) == (1, 1)
        assert "'>'" in str(e.value)

    def test_arity_mismatch(self):
        with pytest.raises(ParseError, match="slot") as e:
            parse_ket("|a> + |b,c>")
        assert e.value.col == 7

    def test_non_ascii(self):
        with pytest.raises(ParseError, match="unknown token") as e:
            parse_ket("|a> + α|b>")
        assert e.value.col == 7

    def test_division_by_zero(self):
        with pytest.raises(ParseError, match="division by zero"):
            parse_ket("|a>/0")

    def test_trailing_operator(self):
        with pytest.raises(ParseError, match="end of input"):
            parse_ket("|a> +")

    def test_source_in_message(self):
        with pytest.raises(ParseError, match=r"^state\.ket:1:1:"):
            parse_ket("|a", source="state.ket")

    def test_expression_keeps_positions(self):
        expr = parse_ket_expr("|a> + |b>", line=4, col=7)
        assert expr.evaluate().norm_squared == pytest.approx(2.0)


class TestFormat:
    def test_example(self):
        k = ket_make(2, [(("a", "b"), R2), (("c", "d"), R2)])
        assert format_ket(k) == "(0.70711|a,b> + 0.70711|c,d>)"

    def test_zero(self):
        assert format_ket(zero(2)) == "0"

    def test_imaginary_rendering(self):
        assert format_ket(ket_make(1, [("x", 1.0), ("y", -0.5j)])) == "(1|x> - 0.5i|y>)"

    def test_phase_canonical(self):
        k = ket_make(1, [("x", 1j), ("y", 1.0)])
        assert format_ket(k) == format_ket(k.scaled(-1j))

    @settings(max_examples=100)
    @given(kets())
    def test_round_trip(self, k):
        back = parse_ket(format_ket(k, digits=None))
        assert equal_up_to_phase(back, k, 1e-9)

    @given(st.text(alphabet="|<>,()+-*/ i0123456789.abc'sqrt", max_size=40))
    def test_fuzz_never_crashes(self, text):
        try:
            parse_ket(text)
        except ParseError:
            pass


class TestBench:
    def test_structure(self):
        plan = parse_bench(HARDY, "hardy.bench")
        assert plan.slots == 2
        assert len(plan.stages) == 4
        assert plan.snapshots == (("after_bs", 2),)
        assert plan.detectors == {0: ("u'+", "v'+"), 1: ("u'-", "v'-")}

    def test_snapshots(self):
        results = dict(compile_and_run(parse_bench(HARDY)))
        after = ket_make(2, [(("c+", "c-"), -3 * S12), (("c+", "d-"), 1j * S12),
                             (("d+", "c-"), 1j * S12), (("d+", "d-"), -S12)])
        final = ket_make(2, [(("u'+", "v'-"), 1j * S3), (("v'+", "u'-"), 1j * S3),
                             (("v'+", "v'-"), S3)])
        assert list(results) == ["after_bs", "final"]
        assert equal_exact(results["after_bs"], after, 1e-12)
        assert equal_exact(results["final"], final, 1e-12)

    def test_deterministic(self):
        plan = parse_bench(HARDY)
        assert compile_and_run(plan) == compile_and_run(plan)

    def test_no_stages_is_identity(self):
        [(name, k)] = compile_and_run(parse_bench(MINIMAL))
        assert name == "final" and k == basis("a")

    def test_phase_and_mirror(self):
        plan = parse_bench(MINIMAL + "stage slot=1 phase mode=a phi=pi\n"
                           "stage slot=1 mirror in=a out=a2\n")
        [(_, k)] = compile_and_run(plan)
        assert k[("a2",)] == pytest.approx(-1.0, abs=1e-15)

    def test_explicit_matrix(self):
        plan = parse_bench(MINIMAL + "stage slot=1 matrix in=a,b out=p,q values=0,1,1,0\n")
        assert compile_and_run(plan)[-1][1] == basis("q")

    @pytest.mark.parametrize("text, message, line", [
        ("slot 1 modes a", "'slots' must be declared first", 1),
        ("slots 1\nslot 1 modes a b\nstate |z>", "undeclared mode 'z'", 3),
        (MINIMAL + "stage slot=1 bs kind=splitter in=a,q out=c,d", "not available in slot 1", 4),
        (MINIMAL + "frobnicate", "unknown directive", 4),
        ("slots 1\nslot 1 modes a b", "state", None),
        (MINIMAL + "detect slot=1 c", "c", 4),
        (MINIMAL + "snapshot final", "final", 4),
        (MINIMAL + "stage slot=1 matrix in=a,b out=p,q values=1,1,1,1", "unitary", 4),
    ])
    def test_errors(self, text, message, line):
        with pytest.raises(ParseError, match=message) as e:
            parse_bench(text, "x.bench")
        if line is not None:
            assert e.value.line == line
        assert str(e.value).startswith("x.bench:")
