"""Monte Carlo for the random-discontinuous-motion particle model.

Jump dynamics are memoryless: once per tick the occupied cell (or, for an
entangled pair, the joint branch) is redrawn i.i.d. from its probability table.
Tick ``k`` covers ``[k*tick, (k+1)*tick)`` in the lab frame, which is also the
frame where synchronized pair jumps and the freezing rule are defined.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .measurement import make_rng
from .relativity import (Frame, IntervalClass, SpacetimeEvent, boost,
                         boosted_time_closed_form, interval_class, simultaneity_velocity)


class RdmError(ValueError):
    pass


@dataclass(frozen=True)
class DensityTable:
    cells: Mapping[str, float]

    def __post_init__(self):
        if not self.cells:
            raise RdmError("density table has no cells")
        for cell, p in self.cells.items():
            if not (math.isfinite(p) and p >= 0):
                raise RdmError(f"cell {cell!r} has invalid probability {p}")
        total = math.fsum(self.cells.values())
        if abs(total - 1.0) > 1e-9:
            raise RdmError(f"cell probabilities sum to {total}, not 1")
        object.__setattr__(self, "cells", dict(self.cells))


def sample_density(d: DensityTable, n: int, seed) -> dict[str, int]:
    """Occupied cell at ``n`` independent instants, as counts per cell."""
    if n <= 0:
        raise RdmError("need at least one sample")
    cells = list(d.cells)
    p = np.array([d.cells[c] for c in cells])
    draws = make_rng(seed).choice(len(cells), size=n, p=p / p.sum())
    return dict(zip(cells, np.bincount(draws, minlength=len(cells)).tolist()))


def histogram_csv(counts: Mapping[str, int]) -> str:
    total = sum(counts.values())
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["cell", "count", "frequency"])
    for cell, n in counts.items():
        w.writerow([cell, n, repr(n / total) if total else "0.0"])
    return out.getvalue()


def read_density(text: str) -> DensityTable:
    """Parse ``cell,probability`` CSV (header row required)."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and not r[0].startswith("#")]
    if not rows or [h.strip() for h in rows[0]] != ["cell", "probability"]:
        raise RdmError("density file must start with the header 'cell,probability'")
    cells = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise RdmError(f"row {lineno}: expected 2 fields, got {len(row)}")
        try:
            cells[row[0].strip()] = float(row[1])
        except ValueError:
            raise RdmError(f"row {lineno}: bad probability {row[1]!r}") from None
    return DensityTable(cells)


Position = tuple[float, float, float]


@dataclass(frozen=True)
class RdmPairConfig:
    """Two correlated position pairs: branch 0 is (r1, r2), branch 1 is (r3, r4)."""

    positions: tuple[tuple[Position, Position], tuple[Position, Position]] = (
        ((0.0, 0.0, 0.0), (10.0, 0.0, 0.0)),
        ((1.0, 0.0, 0.0), (11.0, 0.0, 0.0)),
    )
    branch_probabilities: tuple[float, float] = (0.5, 0.5)
    tick: float = 1.0
    x_axis: int = 0

    def __post_init__(self):
        p1, p2 = self.branch_probabilities
        if min(p1, p2) < 0 or abs(p1 + p2 - 1.0) > 1e-12:
            raise RdmError(f"branch probabilities {self.branch_probabilities} must sum to 1")
        flat = [tuple(map(float, r)) for pair in self.positions for r in pair]
        if len(flat) != 4 or any(len(r) != 3 for r in flat):
            raise RdmError("positions must be two pairs of 3-vectors")
        if len(set(flat)) != 4:
            raise RdmError("the four positions must be distinct")
        if not self.tick > 0:
            raise RdmError("tick must be positive")
        if self.x_axis not in (0, 1, 2):
            raise RdmError("x_axis must be 0, 1 or 2")


@dataclass(frozen=True)
class CorrelationReport:
    trials: int
    matches: int
    mismatch_rate: float
    freezing: bool
    seed: int

    def __post_init__(self):
        if not 0 <= self.matches <= self.trials:
            raise RdmError("matches must lie in [0, trials]")


def tick_index(t: float, tick: float) -> int:
    return int(math.floor(t / tick + 1e-9))


def expected_mismatch(cfg: RdmPairConfig, t_meas1: float, t_meas2: float,
                      freezing: bool) -> float:
    """Mismatch probability of the model: independent redraws between distinct ticks."""
    if freezing or tick_index(t_meas1, cfg.tick) == tick_index(t_meas2, cfg.tick):
        return 0.0
    return 1.0 - math.fsum(p * p for p in cfg.branch_probabilities)


def run_entangled_pair(cfg: RdmPairConfig, t_meas1: float, t_meas2: float, freezing: bool,
                       trials: int, seed: int, shards: int = 1) -> CorrelationReport:
    """Read particle 1 at ``t_meas1`` and particle 2 at ``t_meas2`` over many trials.

    Both particles jump together every tick.  With ``freezing`` the detection of
    particle 1 pins particle 2 to the branch particle 1 was found in.  Shard ``i``
    draws from sub-stream ``(seed, i)``; counts are summed.
    """
    if not (t_meas1 >= 0 and t_meas2 >= t_meas1):
        raise RdmError(f"need 0 <= t_meas1 <= t_meas2, got {t_meas1}, {t_meas2}")
    if trials <= 0:
        raise RdmError("trials must be positive")
    k1, k2 = tick_index(t_meas1, cfg.tick), tick_index(t_meas2, cfg.tick)
    sizes = [trials // shards + (i < trials % shards) for i in range(max(shards, 1))]
    matches = 0
    for shard, size in enumerate(sizes):
        if size:
            matches += _pair_shard(cfg, k1, k2, freezing, size, make_rng(seed, shard))
    return CorrelationReport(trials, matches, 1.0 - matches / trials, freezing, seed)


def _pair_shard(cfg, k1, k2, freezing, trials, rng) -> int:
    p = np.asarray(cfg.branch_probabilities, dtype=float)
    ticks = k2 + 1
    chunk = max(1, 4_000_000 // ticks)
    matches = 0
    for start in range(0, trials, chunk):
        n = min(chunk, trials - start)
        branch = rng.choice(2, size=(n, ticks), p=p / p.sum())
        found1 = branch[:, k1]
        found2 = found1 if freezing else branch[:, k2]
        # particle 1 at r1 pairs with r2, r3 with r4: a match is equal branch indices
        matches += int(np.count_nonzero(found1 == found2))
    return matches


def presence_fraction(p_present: float, ticks: int, seed) -> float:
    """Fraction of ticks on which the particle is found in the surviving packet."""
    if not 0.0 <= p_present <= 1.0:
        raise RdmError(f"p_present must be in [0, 1], got {p_present}")
    if ticks <= 0:
        raise RdmError("ticks must be positive")
    present = make_rng(seed).random(ticks) < p_present
    return float(np.count_nonzero(present)) / ticks


@dataclass(frozen=True)
class JumpRecord:
    departure: SpacetimeEvent
    arrival: SpacetimeEvent
    particle: str = "1"

    def __post_init__(self):
        if self.arrival.t < self.departure.t:
            raise RdmError("a jump cannot arrive before it departs")


@dataclass(frozen=True)
class DuplicationReport:
    interval: IntervalClass
    duplication_frame_exists: bool
    velocity: float | None = None
    common_time: float | None = None
    partner_landing_time: float | None = None
    entanglement_violation_frame: bool | None = None
    notes: list[str] = field(default_factory=list)


def analyze_jump_frames(j: JumpRecord, c: float = 1.0,
                        partner: JumpRecord | None = None) -> DuplicationReport:
    """Look for a frame in which a jump's departure and arrival are simultaneous.

    In that frame the particle sits in both packets at once.  With ``partner``
    (the other particle of an entangled pair) the departure of ``j`` is compared
    with the partner's landing instead, and a simultaneity frame means one
    particle lands in its second packet while the other is still leaving its first.
    """
    if partner is None:
        a, b = j.departure, j.arrival
    else:
        a, b = j.departure, partner.arrival
    kind = interval_class(a, b, c)
    if kind is not IntervalClass.SPACELIKE:
        return DuplicationReport(kind, False,
                                 entanglement_violation_frame=False if partner else None,
                                 notes=[f"{kind.value} separation: causal order is the same in every frame"])
    v = simultaneity_velocity(a, b, c)
    t_common = boost(a, Frame(v, c)).t
    if partner is None:
        return DuplicationReport(kind, True, velocity=v, common_time=t_common)
    return DuplicationReport(kind, True, velocity=v, common_time=t_common,
                             partner_landing_time=boosted_time_closed_form(a, b, c),
                             entanglement_violation_frame=True)
