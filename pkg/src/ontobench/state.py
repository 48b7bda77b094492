"""Sparse kets over labeled multi-particle path bases, plus two-mode occupation states.

A basis label is a tuple of mode names, one per particle slot, e.g. ``("u+", "v-")``.
Amplitudes are Python complex numbers.  Kets are immutable once built.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

Label = tuple[str, ...]

PRUNE_THRESHOLD = 1e-14
NORM_TOL = 1e-12


class StateError(ValueError):
    pass


def _freeze(terms: dict) -> Mapping:
    return MappingProxyType(dict(sorted(terms.items())))


@dataclass(frozen=True, eq=False)
class Ket:
    """A finite superposition of basis labels.

    ``consumed`` lists slots absorbed by a detector; projections on them fail.
    """

    slots: int
    terms: Mapping[Label, complex]
    consumed: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.slots < 1:
            raise StateError(f"slot count must be positive, got {self.slots}")
        for label, amp in self.terms.items():
            _check_label(label, self.slots)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise StateError(f"non-finite amplitude {amp!r} on {label}")
        if not isinstance(self.terms, MappingProxyType):
            object.__setattr__(self, "terms", _freeze(dict(self.terms)))

    def __iter__(self) -> Iterator[tuple[Label, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, label) -> complex:
        return self.terms.get(_as_label(label), 0j)

    def __eq__(self, other):
        if not isinstance(other, Ket):
            return NotImplemented
        return (self.slots == other.slots and dict(self.terms) == dict(other.terms)
                and self.consumed == other.consumed)

    def __hash__(self):
        return hash((self.slots, tuple(self.terms.items()), self.consumed))

    def __repr__(self):
        body = " + ".join(f"{a:.5g}|{','.join(l)}>" for l, a in self.terms.items())
        return f"Ket({body or '0'})"

    @property
    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.terms.values())

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_squared)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= NORM_TOL

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def labels(self) -> list[Label]:
        return list(self.terms)

    def modes(self, slot: int) -> set[str]:
        """Mode names occurring in ``slot`` across the support."""
        return {label[slot] for label in self.terms}

    def scaled(self, factor: complex) -> Ket:
        return _build(self.slots, ((l, a * factor) for l, a in self.terms.items()),
                      self.consumed)

    def normalized(self) -> Ket:
        n = self.norm
        if n == 0.0:
            raise StateError("cannot normalize the zero ket")
        return self.scaled(1.0 / n)

    def relabeled(self, mapping: Mapping[str, str]) -> Ket:
        """Rename modes in every slot; names absent from ``mapping`` are kept."""
        return _build(self.slots,
                      ((tuple(mapping.get(m, m) for m in l), a) for l, a in self.terms.items()),
                      self.consumed)


def _as_label(label) -> Label:
    if isinstance(label, str):
        return (label,)
    return tuple(label)


def _check_label(label: Label, slots: int) -> None:
    if not isinstance(label, tuple):
        raise StateError(f"label must be a tuple, got {label!r}")
    if len(label) != slots:
        raise StateError(f"label {label} has arity {len(label)}, expected {slots}")
    for mode in label:
        if not isinstance(mode, str) or not mode:
            raise StateError(f"mode labels must be nonempty strings, got {mode!r} in {label}")


def _build(slots: int, pairs: Iterable[tuple[Label, complex]],
           consumed: frozenset[int] = frozenset()) -> Ket:
    acc: dict[Label, complex] = {}
    for label, amp in pairs:
        label = _as_label(label)
        _check_label(label, slots)
        amp = complex(amp)
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise StateError(f"non-finite amplitude {amp!r} on {label}")
        acc[label] = acc.get(label, 0j) + amp
    kept = {l: a for l, a in acc.items() if abs(a) >= PRUNE_THRESHOLD}
    return Ket(slots, _freeze(kept), frozenset(consumed))


def ket_make(slots: int, terms: Iterable[tuple[Label | str, complex]] | Mapping,
             normalize: bool = False) -> Ket:
    """Build a ket, merging duplicate labels and pruning near-zero amplitudes.

    >>> ket_make(1, [("x", 0.5), ("x", 0.5)])
    Ket(1|x>)
    """
    if isinstance(terms, Mapping):
        terms = terms.items()
    k = _build(slots, terms)
    if normalize:
        if k.is_zero:
            raise StateError("cannot normalize an all-zero state")
        k = k.normalized()
    return k


def basis(*modes: str) -> Ket:
    """The single basis ket ``|modes>`` with amplitude 1."""
    return ket_make(len(modes), [(tuple(modes), 1.0)])


def zero(slots: int) -> Ket:
    return Ket(slots, _freeze({}))


def superpose(weights: Iterable[tuple[complex, Ket]], slots: int | None = None) -> Ket:
    """Linear combination ``sum(w * k)``; not renormalized.

    An empty sequence gives the zero ket (``slots`` defaults to 1 then).
    """
    weights = list(weights)
    if not weights:
        return zero(slots or 1)
    n = weights[0][1].slots
    if slots is not None and slots != n:
        raise StateError(f"slot mismatch: expected {slots}, got {n}")
    pairs = []
    for w, k in weights:
        if k.slots != n:
            raise StateError(f"slot mismatch: {k.slots} vs {n}")
        pairs.extend((l, w * a) for l, a in k.terms.items())
    return _build(n, pairs)


def tensor(a: Ket, b: Ket) -> Ket:
    consumed = a.consumed | {s + a.slots for s in b.consumed}
    return _build(a.slots + b.slots,
                  ((la + lb, x * y) for la, x in a.terms.items() for lb, y in b.terms.items()),
                  consumed)


class ProbabilityTable(Mapping):
    """Outcome probabilities keyed by basis label."""

    def __init__(self, entries: Mapping[Label, float]):
        self._entries = dict(sorted(entries.items()))
        for label, p in self._entries.items():
            if not 0.0 <= p <= 1.0 + 1e-12:
                raise StateError(f"probability {p} for {label} outside [0, 1]")
        total = math.fsum(self._entries.values())
        if abs(total - 1.0) > 1e-9:
            raise StateError(f"probabilities sum to {total}, not 1")

    def __getitem__(self, label):
        return self._entries[_as_label(label)]

    def get(self, label, default=0.0):
        return self._entries.get(_as_label(label), default)

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __repr__(self):
        return f"ProbabilityTable({self._entries!r})"


def distribution(k: Ket) -> ProbabilityTable:
    if not abs(k.norm_squared - 1.0) <= 1e-9:
        raise StateError(f"distribution needs a normalized ket (norm^2 = {k.norm_squared})")
    return ProbabilityTable({l: abs(a) ** 2 for l, a in k.terms.items()})


def canonicalize(k: Ket) -> Ket:
    """Fix the global phase: first amplitude in label order becomes real positive."""
    if k.is_zero:
        return k
    first_label, first = next(iter(k.terms.items()))
    if first.imag == 0.0 and first.real > 0.0:
        return k
    phase = first.conjugate() / abs(first)
    terms = {l: a * phase for l, a in k.terms.items()}
    terms[first_label] = complex(abs(first), 0.0)
    return Ket(k.slots, _freeze(terms), k.consumed)


def equal_exact(a: Ket, b: Ket, tol: float = 1e-12) -> bool:
    """Term-wise comparison without phase freedom."""
    if a.slots != b.slots:
        return False
    labels = set(a.terms) | set(b.terms)
    return all(abs(a[l] - b[l]) <= tol for l in labels)


def equal_up_to_phase(a: Ket, b: Ket, tol: float = 1e-9) -> bool:
    return equal_exact(canonicalize(a), canonicalize(b), tol)


def inner(a: Ket, b: Ket) -> complex:
    """<a|b>."""
    if a.slots != b.slots:
        raise StateError(f"inner product of {a.slots}-slot and {b.slots}-slot kets")
    return sum((a[l].conjugate() * amp for l, amp in b.terms.items()), 0j)


# -- occupation-number states (two modes, occupancy 0/1) -------------------------

Occupation = tuple[int, int]


@dataclass(frozen=True, eq=False)
class OccupationKet:
    terms: Mapping[Occupation, complex]

    def __post_init__(self):
        clean = {}
        for occ, amp in self.terms.items():
            occ = tuple(occ)
            if len(occ) != 2 or any(n not in (0, 1) for n in occ):
                raise StateError(f"occupation must be a pair of 0/1, got {occ}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_THRESHOLD:
                clean[occ] = clean.get(occ, 0j) + amp
        object.__setattr__(self, "terms", _freeze(clean))

    @property
    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.terms.values())

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= NORM_TOL

    def normalized(self) -> OccupationKet:
        n = math.sqrt(self.norm_squared)
        if n == 0.0:
            raise StateError("cannot normalize the zero state")
        return OccupationKet({o: a / n for o, a in self.terms.items()})


def occupation_from_ket(k: Ket) -> OccupationKet:
    """Read a two-slot ket with labels "0"/"1" as an occupation state."""
    if k.slots != 2:
        raise StateError(f"occupation kets have two modes, got {k.slots} slots")
    terms = {}
    for (na, nb), amp in k.terms.items():
        if na not in ("0", "1") or nb not in ("0", "1"):
            raise StateError(f"occupation labels must be 0 or 1, got ({na},{nb})")
        terms[(int(na), int(nb))] = amp
    return OccupationKet(terms)


def occupation_pair_expectation(k: OccupationKet) -> float:
    """<n_A n_B>: the joint-occupancy weight any pairwise A-B interaction is multiplied by.

    Terms with an empty mode contribute an exact 0.0, so a state supported on
    (1,0) and (0,1) gives exactly zero.
    """
    return math.fsum(abs(a) ** 2 * (na * nb) for (na, nb), a in k.terms.items())
