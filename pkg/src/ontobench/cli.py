"""Command-line front end.

Exit codes: 0 success (every verdict passed), 1 a verdict failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .notation import ParseError, compile_and_run, format_ket, parse_bench, parse_ket
from .rdm import RdmError, histogram_csv, read_density, sample_density
from .relativity import Frame, RelativityError, SpacetimeEvent, boost
from .scenarios import SCENARIOS, ScenarioError, amplitude_table, run_scenario

# which scenario parameter --shots / --trials feed
_COUNT_FLAGS = {
    "hardy": {"shots": "shots"},
    "rdm-entanglement": {"trials": "trials"},
    "vanishing": {"trials": "ticks"},
}
_SEEDED = {"hardy", "rdm-entanglement", "vanishing"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _nonneg_int(s: str) -> int:
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {s}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ontobench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sc = sub.add_parser("scenario", help="run a scripted analysis and emit its JSON report")
    sc.add_argument("name", choices=list(SCENARIOS))
    sc.add_argument("--seed", type=_nonneg_int)
    sc.add_argument("--shots", type=_nonneg_int)
    sc.add_argument("--trials", type=_nonneg_int)
    sc.add_argument("--out")

    pa = sub.add_parser("parse", help="check a .ket or .bench file")
    pa.add_argument("--check", required=True, metavar="FILE")

    be = sub.add_parser("bench", help="bench layout commands")
    be_sub = be.add_subparsers(dest="bench_command", required=True, parser_class=_Parser)
    run = be_sub.add_parser("run", help="evolve a bench layout")
    run.add_argument("file")
    run.add_argument("--snapshots", action="store_true")
    run.add_argument("--out")

    bo = sub.add_parser("boost", help="Lorentz-boost one event")
    bo.add_argument("--v", type=float, required=True)
    bo.add_argument("--c", type=float, default=1.0)
    bo.add_argument("--event", required=True, metavar="T,X")

    rs = sub.add_parser("rdm-sample", help="sample a cell density table")
    rs.add_argument("--density", required=True)
    rs.add_argument("--samples", type=_nonneg_int, required=True)
    rs.add_argument("--seed", type=_nonneg_int, default=0)
    rs.add_argument("--out")
    return p


def _cmd_scenario(args) -> int:
    overrides = {}
    mapping = _COUNT_FLAGS.get(args.name, {})
    for flag in ("shots", "trials"):
        value = getattr(args, flag)
        if value is None:
            continue
        if flag not in mapping:
            raise UsageError(f"scenario {args.name} does not take --{flag}")
        overrides[mapping[flag]] = value
    if args.seed is not None and args.name in _SEEDED:
        overrides["seed"] = args.seed
    try:
        report = run_scenario(args.name, **overrides)
    except (ScenarioError, ValueError) as e:
        raise UsageError(str(e)) from None
    _emit(report.to_json(), args.out)
    for v in report.verdicts:
        if not v.passed:
            print(f"FAIL {v.name}: {v.detail}", file=sys.stderr)
    return 0 if report.passed else 1


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _cmd_parse(args) -> int:
    path = args.check
    text = _read(path)
    if path.endswith(".bench"):
        plan = parse_bench(text, source=path)
        print(f"{path}: ok ({plan.slots} slots, {len(plan.stages)} stages)")
    elif path.endswith(".ket"):
        k = parse_ket(text, source=path)
        print(f"{path}: ok {format_ket(k)}")
    else:
        raise UsageError(f"{path}: expected a .ket or .bench file")
    return 0


def _cmd_bench(args) -> int:
    plan = parse_bench(_read(args.file), source=args.file)
    snaps = compile_and_run(plan)
    if not args.snapshots:
        snaps = snaps[-1:]
    doc = {name: amplitude_table(k) for name, k in snaps}
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _cmd_boost(args) -> int:
    try:
        t, x = (float(s) for s in args.event.split(","))
    except ValueError:
        raise UsageError(f"--event expects T,X, got {args.event!r}") from None
    try:
        e = boost(SpacetimeEvent(t, x), Frame(args.v, args.c))
    except RelativityError as err:
        raise UsageError(str(err)) from None
    print(f"t'={e.t!r} x'={e.x!r}")
    return 0


def _cmd_rdm_sample(args) -> int:
    try:
        table = read_density(_read(args.density))
        counts = sample_density(table, args.samples, args.seed)
    except RdmError as e:
        raise UsageError(f"{args.density}: {e}") from None
    _emit(histogram_csv(counts), args.out)
    return 0


_COMMANDS = {
    "scenario": _cmd_scenario,
    "parse": _cmd_parse,
    "bench": _cmd_bench,
    "boost": _cmd_boost,
    "rdm-sample": _cmd_rdm_sample,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"ontobench: error: {e}", file=sys.stderr)
        return 2
    except ParseError as e:
        print(str(e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
