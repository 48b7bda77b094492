"""Projective detection with collapse, absorbing detectors, ancilla marking and seeded sampling.

Randomness: every sampler takes either an integer seed or a ``numpy.random.Generator``.
Integer seeds go through :func:`make_rng`, which builds a PCG64 generator from
``SeedSequence(seed, spawn_key=stream)``.  Distinct ``stream`` tuples give
independent sub-streams of one master seed (one per scenario phase or shard).
"""

from __future__ import annotations

import math
from collections.abc import Collection, Mapping
from dataclasses import dataclass

import numpy as np

from .state import Ket, Label, _build, distribution


class MeasurementError(ValueError):
    pass


class ImpossibleOutcome(MeasurementError):
    """Conditioning on an outcome of probability zero."""


class ConsumedSlot(MeasurementError):
    """The particle in this slot was absorbed by an earlier detection."""


def make_rng(seed: int | np.random.Generator, *stream: int) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if seed < 0 or seed >= 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=stream)))


@dataclass(frozen=True)
class MeasurementOutcome:
    slot: int
    label: str | frozenset[str]
    probability: float
    post_state: Ket


def _matches(mode: str, label) -> bool:
    return mode == label if isinstance(label, str) else mode in label


def probability(k: Ket, slot: int, label: str | Collection[str]) -> float:
    """Born weight of finding ``slot`` in ``label`` (or in any of a set of labels)."""
    if not 0 <= slot < k.slots:
        raise MeasurementError(f"slot {slot} out of range for a {k.slots}-slot ket")
    return math.fsum(abs(a) ** 2 for l, a in k.terms.items() if _matches(l[slot], label))


def project(k: Ket, slot: int, label: str | Collection[str],
            absorbing: bool = False) -> MeasurementOutcome:
    """Detect ``slot`` in ``label`` and collapse onto the matching branch.

    An absorbing detector marks the slot consumed; later projections on it raise
    :class:`ConsumedSlot`.  Zero-probability outcomes raise :class:`ImpossibleOutcome`.
    """
    if slot in k.consumed:
        raise ConsumedSlot(f"slot {slot} was absorbed by an earlier detection")
    if not k.is_normalized:
        raise MeasurementError(f"projection needs a normalized ket (norm^2 = {k.norm_squared})")
    if not isinstance(label, str):
        label = frozenset(label)
    p = probability(k, slot, label)
    if p == 0.0:
        raise ImpossibleOutcome(f"slot {slot} cannot be found in {_show(label)}: probability 0")
    scale = 1.0 / math.sqrt(p)
    consumed = k.consumed | {slot} if absorbing else k.consumed
    post = _build(k.slots, ((l, a * scale) for l, a in k.terms.items()
                            if _matches(l[slot], label)), consumed)
    return MeasurementOutcome(slot, label, p, post)


def _show(label) -> str:
    return label if isinstance(label, str) else "{" + ",".join(sorted(label)) + "}"


def sample_outcome(k: Ket, seed: int | np.random.Generator) -> Label:
    """One joint label drawn from the Born distribution of ``k``."""
    return sample_labels(k, 1, seed)[0]


def sample_labels(k: Ket, n: int, seed: int | np.random.Generator) -> list[Label]:
    table = distribution(k)
    labels = list(table)
    p = np.array([table[l] for l in labels])
    idx = make_rng(seed).choice(len(labels), size=n, p=p / p.sum())
    return [labels[i] for i in idx]


def sample_counts(k: Ket, shots: int, seed: int | np.random.Generator,
                  shards: int = 1) -> dict[Label, int]:
    """Outcome counts over ``shots`` draws; labels of zero weight never appear.

    With ``shards > 1`` each shard draws from its own sub-stream ``(seed, shard)``
    and the counts are summed.
    """
    if shots < 0:
        raise MeasurementError("shots must be nonnegative")
    table = distribution(k)
    labels = list(table)
    p = np.array([table[l] for l in labels])
    p = p / p.sum()
    counts = np.zeros(len(labels), dtype=np.int64)
    if shards <= 1 or isinstance(seed, np.random.Generator):
        rng = make_rng(seed)
        counts += np.bincount(rng.choice(len(labels), size=shots, p=p), minlength=len(labels))
    else:
        sizes = [shots // shards + (i < shots % shards) for i in range(shards)]
        for i, size in enumerate(sizes):
            rng = make_rng(seed, i)
            counts += np.bincount(rng.choice(len(labels), size=size, p=p),
                                  minlength=len(labels))
    return {l: int(c) for l, c in zip(labels, counts)}


def attach_ancilla(k: Ket, slot: int, marking: Mapping[str, str]) -> Ket:
    """Append an ancilla slot recording which mode ``slot`` occupies.

    Every mode of ``slot`` in the support must be marked.
    """
    if not 0 <= slot < k.slots:
        raise MeasurementError(f"slot {slot} out of range for a {k.slots}-slot ket")
    missing = sorted(k.modes(slot) - set(marking))
    if missing:
        raise MeasurementError(f"no ancilla label for mode(s) {', '.join(missing)}")
    return _build(k.slots + 1, ((l + (marking[l[slot]],), a) for l, a in k.terms.items()),
                  k.consumed)
