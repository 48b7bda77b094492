import math

import pytest
from hypothesis import assume, given, strategies as st

from oracles import brute_force_simultaneity, rapidity_boost
from ontobench.relativity import (Frame, IntervalClass, RelativityError, SpacetimeEvent, boost,
                                  boosted_time_closed_form, interval, interval_class,
                                  order_in_frame, simultaneity_velocity)

coord = st.floats(-100, 100, allow_nan=False)
events = st.builds(SpacetimeEvent, coord, coord)
velocities = st.floats(-0.99, 0.99)


@st.composite
def spacelike_pairs(draw):
    a = draw(events)
    dt = draw(st.floats(-50, 50))
    dx = draw(st.floats(0.01, 100)) * draw(st.sampled_from([-1, 1]))
    assume(abs(dx) > abs(dt) * (1 + 1e-6) + 1e-9)
    return a, SpacetimeEvent(a.t + dt, a.x + dx)


@st.composite
def timelike_pairs(draw):
    a = draw(events)
    dt = draw(st.floats(0.01, 50))
    dx = draw(st.floats(-1, 1)) * dt * 0.999
    return a, SpacetimeEvent(a.t + dt, a.x + dx)


class TestBoost:
    def test_worked_example(self):
        e = boost(SpacetimeEvent(1.0, 1.0), Frame(0.5))
        assert e.t == pytest.approx(0.57735, abs=1e-5)
        assert e.x == pytest.approx(0.57735, abs=1e-5)
        assert Frame(0.5).gamma == pytest.approx(1.15470, abs=1e-5)

    def test_matches_rapidity_oracle(self):
        for t, x, v in [(1, 1, 0.5), (1, 0, 0.8), (2, 5, 0.8), (-3, 7, -0.3)]:
            e = boost(SpacetimeEvent(t, x), Frame(v))
            assert (e.t, e.x) == pytest.approx(rapidity_boost(t, x, v), abs=1e-12)

    def test_zero_velocity_identity(self):
        e = SpacetimeEvent(3.5, -2.0)
        assert boost(e, Frame(0.0)) == e

    def test_superluminal_frame(self):
        with pytest.raises(RelativityError, match=r"\|v\| must be < c"):
            Frame(1.5)
        with pytest.raises(RelativityError):
            Frame(1.0)

    def test_si_units(self):
        c = 299_792_458.0
        e = boost(SpacetimeEvent(1e-6, 100.0), Frame(0.6 * c, c))
        assert e.t == pytest.approx(rapidity_boost(1e-6, 100.0, 0.6 * c, c)[0], rel=1e-12)

    @given(events, velocities)
    def test_round_trip(self, e, v):
        back = boost(boost(e, Frame(v)), Frame(-v))
        scale = max(1.0, abs(e.t), abs(e.x))
        assert abs(back.t - e.t) <= 1e-12 * scale * 10
        assert abs(back.x - e.x) <= 1e-12 * scale * 10

    @given(events, events, velocities)
    def test_interval_invariant(self, a, b, v):
        f = Frame(v)
        scale = max(1.0, (a.t - b.t) ** 2 + (a.x - b.x) ** 2)
        assert abs(interval(boost(a, f), boost(b, f)) - interval(a, b)) <= 1e-9 * scale


class TestIntervals:
    def test_classes(self):
        o = SpacetimeEvent(0, 0)
        assert interval_class(o, SpacetimeEvent(1, 3)) is IntervalClass.SPACELIKE
        assert interval_class(o, SpacetimeEvent(2, 1)) is IntervalClass.TIMELIKE
        assert interval_class(o, SpacetimeEvent(1, 1)) is IntervalClass.LIGHTLIKE


class TestSimultaneity:
    def test_origin_example(self):
        a, b = SpacetimeEvent(0, 0), SpacetimeEvent(1, 3)
        v = simultaneity_velocity(a, b)
        assert v == pytest.approx(1 / 3, abs=1e-15)
        assert boost(a, Frame(v)).t == pytest.approx(0.0, abs=1e-15)
        assert boost(b, Frame(v)).t == pytest.approx(0.0, abs=1e-12)

    def test_offset_example(self):
        a, b = SpacetimeEvent(1, 1), SpacetimeEvent(2, 4)
        v = simultaneity_velocity(a, b)
        assert v == pytest.approx(brute_force_simultaneity((1, 1), (2, 4)), abs=1e-12)
        assert boost(a, Frame(v)).t == pytest.approx(0.70711, abs=1e-5)
        assert boost(b, Frame(v)).t == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    def test_timelike_rejected(self):
        with pytest.raises(RelativityError):
            simultaneity_velocity(SpacetimeEvent(0, 0), SpacetimeEvent(2, 1))

    def test_lightlike_rejected(self):
        with pytest.raises(RelativityError):
            simultaneity_velocity(SpacetimeEvent(0, 0), SpacetimeEvent(1, 1))

    def test_same_place_rejected(self):
        with pytest.raises(RelativityError):
            simultaneity_velocity(SpacetimeEvent(0, 2), SpacetimeEvent(1, 2))

    @given(spacelike_pairs())
    def test_spacelike_gives_subluminal_frame(self, pair):
        a, b = pair
        v = simultaneity_velocity(a, b)
        assert abs(v) < 1
        f = Frame(v)
        scale = max(1.0, abs(a.t), abs(a.x), abs(b.t), abs(b.x)) * f.gamma
        assert abs(boost(a, f).t - boost(b, f).t) <= 1e-9 * scale

    @given(timelike_pairs())
    def test_timelike_formula_superluminal(self, pair):
        a, b = pair
        dx = b.x - a.x
        if dx != 0:
            assert abs((b.t - a.t) / dx) > 1
        with pytest.raises(RelativityError):
            simultaneity_velocity(a, b)


class TestClosedForm:
    def test_worked_example(self):
        t = boosted_time_closed_form(SpacetimeEvent(1, 1), SpacetimeEvent(2, 4))
        assert t == pytest.approx(0.70711, abs=1e-5)
        assert t == pytest.approx(2 / (3 * math.sqrt(8 / 9)), abs=1e-15)

    def test_numerator_vanishes(self):
        assert boosted_time_closed_form(SpacetimeEvent(0, 0), SpacetimeEvent(1, 3)) == 0.0

    @given(spacelike_pairs())
    def test_agrees_with_rapidity_oracle(self, pair):
        a, b = pair
        v = simultaneity_velocity(a, b)
        ref_a = rapidity_boost(a.t, a.x, v)[0]
        ref_b = rapidity_boost(b.t, b.x, v)[0]
        t = boosted_time_closed_form(a, b)
        scale = max(1.0, abs(a.t), abs(a.x), abs(b.t), abs(b.x)) * Frame(v).gamma
        assert abs(t - ref_a) <= 1e-9 * scale
        assert abs(t - ref_b) <= 1e-9 * scale


class TestOrdering:
    def test_reversal(self):
        ev = [SpacetimeEvent(1, 0), SpacetimeEvent(2, 5)]
        assert boost(ev[0], Frame(0.8)).t == pytest.approx(1.6667, abs=1e-4)
        assert boost(ev[1], Frame(0.8)).t == pytest.approx(-3.3333, abs=1e-4)
        assert order_in_frame(ev, Frame(0.8)) == (1, 0)

    def test_lab_order(self):
        ev = [SpacetimeEvent(1, 0), SpacetimeEvent(2, 5)]
        assert order_in_frame(ev, Frame(0.0)) == (0, 1)

    def test_stable_ties(self):
        ev = [SpacetimeEvent(1, 0), SpacetimeEvent(1, 0)]
        assert order_in_frame(ev, 0.3) == (0, 1)

    @given(timelike_pairs(), velocities)
    def test_causal_order_invariant(self, pair, v):
        assert order_in_frame(list(pair), Frame(v)) == (0, 1)
