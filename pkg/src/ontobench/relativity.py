"""Lorentz kinematics in 1+1 dimensions: boosts, interval classes, simultaneity frames."""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass

LIGHTLIKE_TOL = 1e-12


class RelativityError(ValueError):
    pass


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise RelativityError(f"event coordinates must be finite, got ({self.t}, {self.x})")


@dataclass(frozen=True)
class Frame:
    """Inertial frame moving with velocity ``v`` along x relative to the lab."""

    v: float
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise RelativityError(f"c must be positive, got {self.c}")
        if not abs(self.v) < self.c:
            raise RelativityError("|v| must be < c")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - (self.v / self.c) ** 2)


class IntervalClass(enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


def _frame(f: Frame | float) -> Frame:
    return f if isinstance(f, Frame) else Frame(float(f))


def boost(e: SpacetimeEvent, f: Frame | float) -> SpacetimeEvent:
    f = _frame(f)
    g = f.gamma
    return SpacetimeEvent((e.t - e.x * f.v / f.c ** 2) * g, (e.x - e.t * f.v) * g)


def interval(a: SpacetimeEvent, b: SpacetimeEvent, c: float = 1.0) -> float:
    """(c dt)^2 - dx^2; positive for timelike pairs."""
    return (c * (b.t - a.t)) ** 2 - (b.x - a.x) ** 2


def interval_class(a: SpacetimeEvent, b: SpacetimeEvent, c: float = 1.0) -> IntervalClass:
    ct2 = (c * (b.t - a.t)) ** 2
    dx2 = (b.x - a.x) ** 2
    if abs(ct2 - dx2) <= LIGHTLIKE_TOL * max(1.0, ct2, dx2):
        return IntervalClass.LIGHTLIKE
    return IntervalClass.SPACELIKE if dx2 > ct2 else IntervalClass.TIMELIKE


def simultaneity_velocity(a: SpacetimeEvent, b: SpacetimeEvent, c: float = 1.0) -> float:
    """Velocity of the frame in which ``a`` and ``b`` happen at the same time.

    Only spacelike pairs have one; the formula would give |v| >= c otherwise.
    """
    kind = interval_class(a, b, c)
    if kind is not IntervalClass.SPACELIKE:
        raise RelativityError(f"events are {kind.value}: no frame makes them simultaneous")
    return (b.t - a.t) * c ** 2 / (b.x - a.x)


def boosted_time_closed_form(a: SpacetimeEvent, b: SpacetimeEvent, c: float = 1.0) -> float:
    """Common time of ``a`` and ``b`` in their simultaneity frame, without boosting."""
    v = simultaneity_velocity(a, b, c)
    return (b.x * a.t - b.t * a.x) / ((b.x - a.x) * math.sqrt(1.0 - v ** 2 / c ** 2))


def order_in_frame(events: Sequence[SpacetimeEvent], f: Frame | float) -> tuple[int, ...]:
    """Indices of ``events`` sorted by boosted time (stable for ties)."""
    f = _frame(f)
    times = [boost(e, f).t for e in events]
    return tuple(sorted(range(len(events)), key=times.__getitem__))
