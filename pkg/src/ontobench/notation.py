"""Text front ends: Dirac-notation ket expressions and line-oriented bench layouts.

Ket grammar (whitespace is insignificant outside labels)::

    expr  := sign? (group | sum) ('/' scale)?
    group := '(' sum ')'
    sum   := sign? term (('+' | '-') term)*
    term  := coeff? ket
    coeff := 'i' | number '*'? 'i'? | '(' signed (',' signed)? ')'
    ket   := '|' label (',' label)* '>'
    scale := number | 'sqrt' '(' number ')'

Labels match ``[A-Za-z0-9_+'-]+``; ``|u+,v->`` has labels ``u+`` and ``v-``.
Only ASCII ``i`` and ``sqrt`` are accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .optics import (BeamSplitterKind, ModeMap, OpticsError, apply_to_slot, make_beam_splitter,
                     make_mirror, make_phase)
from .state import Ket, PRUNE_THRESHOLD, canonicalize, ket_make


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1, source: str | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.source = source

    def __str__(self):
        return f"{self.source or '<input>'}:{self.line}:{self.col}: {self.message}"


_LABEL_CHARS = re.compile(r"[A-Za-z0-9_+'\-]")
_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, i, sqrt, ket, or the punctuation character itself
    value: object
    line: int
    col: int


def _tokenize(text: str, line0: int = 1, col0: int = 1, source=None) -> list[_Tok]:
    toks = []
    pos, line, col = 0, line0, col0

    def err(msg, l=None, c=None):
        return ParseError(msg, l or line, c or col, source)

    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            pos, line, col = pos + 1, line + 1, 1
            continue
        if ch.isspace():
            pos, col = pos + 1, col + 1
            continue
        start_line, start_col = line, col
        if ch == "|":
            labels, pos2, col2 = [], pos + 1, col + 1
            while True:
                lab_start = pos2
                while pos2 < len(text) and _LABEL_CHARS.match(text[pos2]):
                    pos2 += 1
                label = text[lab_start:pos2]
                col2 += pos2 - lab_start
                if not label:
                    if pos2 >= len(text):
                        raise err("unclosed ket: expected a label", start_line, start_col)
                    raise err(f"expected a mode label, found {text[pos2]!r}", line, col2)
                labels.append(label)
                if pos2 >= len(text):
                    raise err("unclosed ket: missing '>'", start_line, start_col)
                if text[pos2] == ",":
                    pos2, col2 = pos2 + 1, col2 + 1
                    continue
                if text[pos2] == ">":
                    pos2, col2 = pos2 + 1, col2 + 1
                    break
                raise err(f"unexpected {text[pos2]!r} inside ket", line, col2)
            toks.append(_Tok("ket", tuple(labels), start_line, start_col))
            pos, col = pos2, col2
            continue
        m = _NUMBER.match(text, pos)
        if m:
            toks.append(_Tok("num", float(m.group()), line, col))
            col += m.end() - pos
            pos = m.end()
            continue
        if text.startswith("sqrt", pos):
            toks.append(_Tok("sqrt", None, line, col))
            pos, col = pos + 4, col + 4
            continue
        if ch == "i" and not (pos + 1 < len(text) and text[pos + 1].isalnum()):
            toks.append(_Tok("i", None, line, col))
            pos, col = pos + 1, col + 1
            continue
        if ch in "()+-*/,":
            toks.append(_Tok(ch, None, line, col))
            pos, col = pos + 1, col + 1
            continue
        raise err(f"unknown token {ch!r}")
    toks.append(_Tok("end", None, line, col))
    return toks


@dataclass(frozen=True)
class KetExpr:
    """Parse tree: signed coefficient per term, plus an optional global divisor."""

    terms: tuple[tuple[complex, tuple[str, ...]], ...]
    divisor: float = 1.0
    positions: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def evaluate(self) -> Ket:
        return ket_make(len(self.terms[0][1]), [(l, c / self.divisor) for c, l in self.terms])


class _KetParser:
    def __init__(self, toks, source):
        self.toks = toks
        self.i = 0
        self.source = source

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col, self.source)

    def expect(self, kind, what=None):
        if self.tok.kind != kind:
            raise self.error(f"expected {what or repr(kind)}, found {self._describe(self.tok)}")
        tok = self.tok
        self.i += 1
        return tok

    @staticmethod
    def _describe(tok):
        if tok.kind == "end":
            return "end of input"
        if tok.kind == "num":
            return f"number {tok.value:g}"
        if tok.kind == "ket":
            return f"ket |{','.join(tok.value)}>"
        return repr(tok.kind)

    def parse(self) -> KetExpr:
        sign = 1
        grouped = self.peek(0).kind == "(" or (self.tok.kind in ("+", "-")
                                               and self.peek(1).kind == "(")
        if grouped:
            save = self.i
            sign = self._sign()
            if self._is_coeff_paren():
                # a leading "(re,im)" coefficient, not a group; the sum parses the sign
                self.i, sign, grouped = save, 1, False
        if grouped:
            self.i += 1
            terms = self._sum()
            self.expect(")", "')' closing the group")
        else:
            terms = self._sum()
        if sign == -1:
            terms = [(-c, l, p) for c, l, p in terms]
        divisor = 1.0
        if self.tok.kind == "/":
            self.i += 1
            divisor = self._scale()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self._describe(self.tok)}")
        arity = len(terms[0][1])
        for _, labels, (line, col) in terms:
            if len(labels) != arity:
                raise ParseError(f"ket has {len(labels)} slot(s) but the first term has {arity}",
                                 line, col, self.source)
        return KetExpr(tuple((c, l) for c, l, _ in terms), divisor,
                       tuple(p for _, _, p in terms))

    def _sign(self) -> int:
        if self.tok.kind in ("+", "-"):
            s = -1 if self.tok.kind == "-" else 1
            self.i += 1
            return s
        return 1

    def _is_coeff_paren(self) -> bool:
        k = 1
        if self.peek(k).kind in ("+", "-"):
            k += 1
        if self.peek(k).kind != "num":
            return False
        k += 1
        if self.peek(k).kind == ")":
            return True
        if self.peek(k).kind != ",":
            return False
        k += 1
        if self.peek(k).kind in ("+", "-"):
            k += 1
        return self.peek(k).kind == "num" and self.peek(k + 1).kind == ")"

    def _sum(self):
        sign = self._sign()
        terms = [self._term(sign)]
        while self.tok.kind in ("+", "-"):
            sign = -1 if self.tok.kind == "-" else 1
            self.i += 1
            terms.append(self._term(sign))
        return terms

    def _term(self, sign):
        coeff = self._coeff()
        ket = self.expect("ket", "a ket '|...>'")
        return sign * coeff, ket.value, (ket.line, ket.col)

    def _coeff(self) -> complex:
        tok = self.tok
        if tok.kind == "i":
            self.i += 1
            return 1j
        if tok.kind == "num":
            self.i += 1
            value = tok.value
            if self.tok.kind == "*":
                self.i += 1
                self.expect("i", "'i' after '*'")
                return value * 1j
            if self.tok.kind == "i":
                self.i += 1
                return value * 1j
            return complex(value)
        if tok.kind == "(" and self._is_coeff_paren():
            self.i += 1
            re_part = self._signed()
            im_part = 0.0
            if self.tok.kind == ",":
                self.i += 1
                im_part = self._signed()
            self.expect(")")
            return complex(re_part, im_part)
        if tok.kind == "ket":
            return 1.0
        raise self.error(f"expected a coefficient or ket, found {self._describe(tok)}")

    def _signed(self) -> float:
        s = self._sign()
        return s * self.expect("num", "a number").value

    def _scale(self) -> float:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            value = tok.value
        elif tok.kind == "sqrt":
            self.i += 1
            self.expect("(", "'(' after sqrt")
            value = math.sqrt(self.expect("num", "a number").value)
            self.expect(")", "')' closing sqrt")
        else:
            raise self.error(f"expected a divisor, found {self._describe(tok)}")
        if value == 0:
            raise ParseError("division by zero", tok.line, tok.col, self.source)
        return value


def parse_ket_expr(text: str, source: str | None = None, line: int = 1, col: int = 1) -> KetExpr:
    return _KetParser(_tokenize(text, line, col, source), source).parse()


def parse_ket(text: str, source: str | None = None) -> Ket:
    """Parse a ket expression such as ``"(|a,b> + |c,d>)/sqrt(2)"``."""
    return parse_ket_expr(text, source).evaluate()


def _num(x: float, digits: int | None) -> str:
    return repr(x) if digits is None else f"{x:.{digits}g}"


def format_ket(k: Ket, digits: int | None = 5) -> str:
    """Canonical text: label order, global phase fixed, ``digits`` significant digits.

    ``digits=None`` writes shortest round-trip floats, so parsing gives the ket back.
    """
    k = canonicalize(k)
    if k.is_zero:
        return "0"
    parts = []
    for n, (label, amp) in enumerate(k.terms.items()):
        re_part = amp.real if abs(amp.real) >= PRUNE_THRESHOLD else 0.0
        im_part = amp.imag if abs(amp.imag) >= PRUNE_THRESHOLD else 0.0
        if im_part == 0.0:
            sign, body = ("-" if re_part < 0 else "+"), _num(abs(re_part), digits)
        elif re_part == 0.0:
            sign, body = ("-" if im_part < 0 else "+"), _num(abs(im_part), digits) + "i"
        else:
            sign, body = "+", f"({_num(re_part, digits)},{_num(im_part, digits)})"
        ket = f"{body}|{','.join(label)}>"
        if n == 0:
            parts.append(ket if sign == "+" else "-" + ket)
        else:
            parts.append(f" {sign} {ket}")
    return "(" + "".join(parts) + ")"


# -- bench layouts ----------------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    slot: int  # zero-based
    mode_map: ModeMap
    line: int = 0


@dataclass(frozen=True)
class BenchPlan:
    slots: int
    alphabets: tuple[tuple[str, ...], ...]
    state_text: str
    initial: Ket
    stages: tuple[Stage, ...]
    snapshots: tuple[tuple[str, int], ...]  # (name, number of stages applied)
    detectors: dict[int, tuple[str, ...]]


_PHI = re.compile(r"^([+-]?)(\d+\.?\d*|\.\d+)?\*?pi(?:/(\d+\.?\d*))?$")


def _parse_phi(text: str) -> float:
    m = _PHI.match(text)
    if m:
        sign, mult, div = m.groups()
        value = (float(mult) if mult else 1.0) * math.pi / (float(div) if div else 1.0)
        return -value if sign == "-" else value
    return float(text)


def _parse_complex(text: str) -> complex:
    return complex(text.replace("i", "j"))


class _BenchParser:
    STAGE_KEYS = {
        "bs": {"kind", "in", "out"},
        "phase": {"mode", "phi"},
        "mirror": {"in", "out"},
        "matrix": {"in", "out", "values"},
    }

    def __init__(self, text, source):
        self.text = text
        self.source = source
        self.slots = None
        self.declared: dict[int, list[str]] = {}
        self.state = None
        self.stages = []
        self.snapshots = []
        self.detectors = {}

    def error(self, msg, line, col=1):
        return ParseError(msg, line, col, self.source)

    def parse(self) -> BenchPlan:
        for lineno, raw in enumerate(self.text.split("\n"), start=1):
            line = raw.split("#", 1)[0].rstrip()
            words = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
            if words:
                self._directive(words, line, lineno)
        return self._finish()

    def _directive(self, words, line, lineno):
        head, col = words[0]
        handler = getattr(self, f"_d_{head}", None)
        if handler is None:
            raise self.error(f"unknown directive {head!r}", lineno, col)
        if head != "slots" and self.slots is None:
            raise self.error("'slots' must be declared first", lineno, col)
        handler(words, line, lineno)

    def _int(self, word, col, lineno, what):
        try:
            return int(word)
        except ValueError:
            raise self.error(f"expected an integer {what}, found {word!r}", lineno, col) from None

    def _slot_index(self, word, col, lineno):
        n = self._int(word, col, lineno, "slot number")
        if not 1 <= n <= self.slots:
            raise self.error(f"slot {n} out of range 1..{self.slots}", lineno, col)
        return n - 1

    def _d_slots(self, words, line, lineno):
        if self.slots is not None:
            raise self.error("'slots' declared twice", lineno, words[0][1])
        if len(words) != 2:
            raise self.error("usage: slots <n>", lineno, words[0][1])
        self.slots = self._int(*words[1], lineno, "slot count")
        if self.slots < 1:
            raise self.error("slot count must be positive", lineno, words[1][1])

    def _d_slot(self, words, line, lineno):
        if len(words) < 4 or words[2][0] != "modes":
            raise self.error("usage: slot <n> modes <label> ...", lineno, words[0][1])
        s = self._slot_index(*words[1], lineno)
        if s in self.declared:
            raise self.error(f"modes of slot {s + 1} declared twice", lineno, words[1][1])
        modes = []
        for w, c in words[3:]:
            if not all(_LABEL_CHARS.match(ch) for ch in w):
                raise self.error(f"invalid mode label {w!r}", lineno, c)
            if w in modes:
                raise self.error(f"mode {w!r} listed twice", lineno, c)
            modes.append(w)
        self.declared[s] = modes

    def _d_state(self, words, line, lineno):
        if self.state is not None:
            raise self.error("'state' given twice", lineno, words[0][1])
        if len(words) < 2:
            raise self.error("usage: state <ket-expression>", lineno, words[0][1])
        col = words[1][1]
        expr = parse_ket_expr(line[col - 1:], self.source, lineno, col)
        self.state = (expr, lineno, col, line[col - 1:])

    def _kv(self, words, lineno):
        out = {}
        for w, c in words:
            if "=" not in w:
                raise self.error(f"expected key=value, found {w!r}", lineno, c)
            key, value = w.split("=", 1)
            if key in out:
                raise self.error(f"duplicate key {key!r}", lineno, c)
            out[key] = (value, c)
        return out

    def _d_stage(self, words, line, lineno):
        if len(words) < 3 or not words[1][0].startswith("slot="):
            raise self.error("usage: stage slot=<n> <bs|phase|mirror|matrix> key=value ...",
                             lineno, words[0][1])
        slot_word, slot_col = words[1]
        s = self._slot_index(slot_word[5:], slot_col + 5, lineno)
        kind, kind_col = words[2]
        allowed = self.STAGE_KEYS.get(kind)
        if allowed is None:
            raise self.error(f"unknown stage type {kind!r}", lineno, kind_col)
        kv = self._kv(words[3:], lineno)
        for key, (_, c) in kv.items():
            if key not in allowed:
                raise self.error(f"unknown key {key!r} for {kind} stage", lineno, c)
        for key in sorted(allowed - set(kv)):
            raise self.error(f"{kind} stage needs {key}=...", lineno, kind_col)

        def modes(key, n):
            value, c = kv[key]
            parts = value.split(",")
            if len(parts) != n or not all(parts):
                raise self.error(f"{key}= needs {n} mode label(s)", lineno, c)
            return tuple(parts)

        try:
            if kind == "bs":
                value, c = kv["kind"]
                try:
                    bs_kind = BeamSplitterKind(value)
                except ValueError:
                    raise self.error(f"unknown beam splitter kind {value!r}", lineno, c) from None
                m = make_beam_splitter(bs_kind, modes("in", 2), modes("out", 2))
            elif kind == "phase":
                value, c = kv["phi"]
                try:
                    phi = _parse_phi(value)
                except ValueError:
                    raise self.error(f"bad phase {value!r}", lineno, c) from None
                m = make_phase(modes("mode", 1)[0], phi)
            elif kind == "mirror":
                m = make_mirror(modes("in", 1)[0], modes("out", 1)[0])
            else:
                ins, outs = modes("in", 2), modes("out", 2)
                value, c = kv["values"]
                try:
                    vals = [_parse_complex(v) for v in value.split(",")]
                except ValueError:
                    raise self.error(f"bad matrix entries {value!r}", lineno, c) from None
                if len(vals) != 4:
                    raise self.error("values= needs 4 entries (row-major 2x2)", lineno, c)
                m = ModeMap(ins, outs, [vals[:2], vals[2:]])
        except OpticsError as e:
            raise self.error(str(e), lineno, kind_col) from None
        self.stages.append((Stage(s, m, lineno), kind_col))

    def _d_snapshot(self, words, line, lineno):
        if len(words) != 2:
            raise self.error("usage: snapshot <name>", lineno, words[0][1])
        name, c = words[1]
        if name == "final" or name in (n for n, _ in self.snapshots):
            raise self.error(f"snapshot name {name!r} already used", lineno, c)
        self.snapshots.append((name, len(self.stages)))

    def _d_detect(self, words, line, lineno):
        if len(words) < 3 or not words[1][0].startswith("slot="):
            raise self.error("usage: detect slot=<n> <label> ...", lineno, words[0][1])
        s = self._slot_index(words[1][0][5:], words[1][1] + 5, lineno)
        if s in self.detectors:
            raise self.error(f"detectors for slot {s + 1} given twice", lineno, words[1][1])
        self.detectors[s] = (tuple(w for w, _ in words[2:]), lineno,
                             tuple(c for _, c in words[2:]))

    def _finish(self) -> BenchPlan:
        end = self.text.count("\n") + 1
        if self.slots is None:
            raise self.error("missing 'slots' directive", end)
        for s in range(self.slots):
            if s not in self.declared:
                raise self.error(f"missing 'slot {s + 1} modes ...' declaration", end)
        if self.state is None:
            raise self.error("missing 'state' line", end)
        expr, st_line, st_col, st_text = self.state
        if len(expr.terms[0][1]) != self.slots:
            raise self.error(f"state has {len(expr.terms[0][1])} slot(s), plan declares "
                             f"{self.slots}", st_line, st_col)
        for (_, labels), (l, c) in zip(expr.terms, expr.positions):
            for s, mode in enumerate(labels):
                if mode not in self.declared[s]:
                    raise self.error(f"undeclared mode {mode!r} in slot {s + 1}", l, c)
        alphabets = [list(self.declared[s]) for s in range(self.slots)]
        for stage, col in self.stages:
            alpha = alphabets[stage.slot]
            for mode in stage.mode_map.inputs:
                if mode not in alpha:
                    raise self.error(f"stage consumes mode {mode!r} not available in slot "
                                     f"{stage.slot + 1}", stage.line, col)
            rest = [m for m in alpha if m not in stage.mode_map.inputs]
            for mode in stage.mode_map.outputs:
                if mode in rest:
                    raise self.error(f"stage output {mode!r} already exists in slot "
                                     f"{stage.slot + 1}", stage.line, col)
            alphabets[stage.slot] = rest + list(stage.mode_map.outputs)
        for s, (labels, l, cols) in self.detectors.items():
            for mode, c in zip(labels, cols):
                if mode not in alphabets[s]:
                    raise self.error(f"detector mode {mode!r} does not exist in slot {s + 1} "
                                     "after the final stage", l, c)
        return BenchPlan(
            slots=self.slots,
            alphabets=tuple(tuple(self.declared[s]) for s in range(self.slots)),
            state_text=st_text,
            initial=expr.evaluate(),
            stages=tuple(st for st, _ in self.stages),
            snapshots=tuple(self.snapshots),
            detectors={s: labels for s, (labels, _, _) in sorted(self.detectors.items())},
        )


def parse_bench(text: str, source: str | None = None) -> BenchPlan:
    """Parse and validate a bench layout (see README for the directive list)."""
    return _BenchParser(text, source).parse()


def compile_and_run(plan: BenchPlan) -> list[tuple[str, Ket]]:
    """Evolve the initial state stage by stage; returns snapshots then ``("final", ket)``."""
    ket = plan.initial
    out = []
    pending = list(plan.snapshots)
    for n, stage in enumerate(plan.stages):
        while pending and pending[0][1] == n:
            out.append((pending.pop(0)[0], ket))
        ket = apply_to_slot(ket, stage.slot, stage.mode_map)
    out.extend((name, ket) for name, _ in pending)
    out.append(("final", ket))
    return out
