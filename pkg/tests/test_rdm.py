import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from oracles import brute_force_simultaneity
from ontobench.relativity import Frame, IntervalClass, SpacetimeEvent, boost
from ontobench.rdm import (DensityTable, JumpRecord, RdmError, RdmPairConfig, analyze_jump_frames,
                           expected_mismatch, histogram_csv, presence_fraction, read_density,
                           run_entangled_pair, sample_density, tick_index)


def within_3sigma(hits, n, p):
    sigma = math.sqrt(p * (1 - p) / n)
    return abs(hits / n - p) <= 3 * sigma


class TestDensity:
    def test_uniform_two_cells(self):
        counts = sample_density(DensityTable({"A": 0.5, "B": 0.5}), 50_000, 1)
        assert sum(counts.values()) == 50_000
        assert within_3sigma(counts["A"], 50_000, 0.5)

    def test_skewed_chi_square(self):
        probs = {"A": 0.75, "B": 1 / 12, "C": 1 / 12, "D": 1 / 12}
        n = 100_000
        counts = sample_density(DensityTable(probs), n, 2)
        _, p = stats.chisquare([counts[c] for c in probs], [probs[c] * n for c in probs])
        assert p > 0.001

    def test_point_mass(self):
        counts = sample_density(DensityTable({"A": 1.0, "B": 0.0}), 1000, 3)
        assert counts == {"A": 1000, "B": 0}

    def test_zero_samples(self):
        with pytest.raises(RdmError):
            sample_density(DensityTable({"A": 1.0}), 0, 0)

    def test_bad_table(self):
        with pytest.raises(RdmError):
            DensityTable({"A": 0.7, "B": 0.7})
        with pytest.raises(RdmError):
            DensityTable({"A": -0.5, "B": 1.5})

    def test_seed_reproducible(self):
        d = DensityTable({"A": 0.3, "B": 0.7})
        assert sample_density(d, 500, 9) == sample_density(d, 500, 9)

    def test_csv_round(self):
        text = histogram_csv({"A": 3, "B": 1})
        assert text == "cell,count,frequency\nA,3,0.75\nB,1,0.25\n"

    def test_read_density(self):
        d = read_density("cell,probability\nA,0.25\nB,0.75\n")
        assert d.cells == {"A": 0.25, "B": 0.75}

    def test_read_density_errors(self):
        with pytest.raises(RdmError, match="header"):
            read_density("A,0.5\nB,0.5\n")
        with pytest.raises(RdmError, match="row 2"):
            read_density("cell,probability\nA,half\n")


class TestEntangledPair:
    cfg = RdmPairConfig()

    def test_freezing_never_mismatches(self):
        r = run_entangled_pair(self.cfg, 1.0, 2.0, True, 10_000, 0)
        assert r.mismatch_rate == 0.0 and r.matches == r.trials

    def test_without_freezing_half_mismatch(self):
        r = run_entangled_pair(self.cfg, 1.0, 2.0, False, 10_000, 0)
        assert within_3sigma(r.trials - r.matches, r.trials, 0.5)
        assert expected_mismatch(self.cfg, 1.0, 2.0, False) == 0.5

    def test_same_tick_always_matches(self):
        r = run_entangled_pair(self.cfg, 1.0, 1.0, False, 10_000, 0)
        assert r.mismatch_rate == 0.0
        assert run_entangled_pair(self.cfg, 1.2, 1.7, False, 1000, 0).mismatch_rate == 0.0

    def test_certain_branch(self):
        cfg = RdmPairConfig(branch_probabilities=(1.0, 0.0))
        assert run_entangled_pair(cfg, 1.0, 5.0, False, 5000, 4).mismatch_rate == 0.0
        assert expected_mismatch(cfg, 1.0, 5.0, False) == 0.0

    def test_skewed_branches(self):
        cfg = RdmPairConfig(branch_probabilities=(0.8, 0.2))
        r = run_entangled_pair(cfg, 0.0, 3.0, False, 20_000, 5)
        assert within_3sigma(r.trials - r.matches, r.trials, 1 - 0.8 ** 2 - 0.2 ** 2)

    def test_reversed_times_rejected(self):
        with pytest.raises(RdmError):
            run_entangled_pair(self.cfg, 2.0, 1.0, False, 10, 0)

    def test_sharding_deterministic(self):
        a = run_entangled_pair(self.cfg, 1.0, 2.0, False, 10_001, 8, shards=3)
        b = run_entangled_pair(self.cfg, 1.0, 2.0, False, 10_001, 8, shards=3)
        assert a == b and a.trials == 10_001

    def test_tick_index_boundaries(self):
        assert tick_index(1.0, 1.0) == 1
        assert tick_index(0.3 * 10, 0.3) == 10
        assert tick_index(0.999, 1.0) == 0

    def test_bad_config(self):
        with pytest.raises(RdmError):
            RdmPairConfig(branch_probabilities=(0.5, 0.6))
        with pytest.raises(RdmError):
            RdmPairConfig(tick=0.0)


class TestPresence:
    def test_half(self):
        assert abs(presence_fraction(0.5, 100_000, 0) - 0.5) <= 0.005

    def test_extremes(self):
        assert presence_fraction(1.0, 1000, 0) == 1.0
        assert presence_fraction(0.0, 1000, 0) == 0.0

    def test_invalid(self):
        with pytest.raises(RdmError):
            presence_fraction(1.5, 10, 0)


class TestJumpFrames:
    def test_spacelike_jump(self):
        rep = analyze_jump_frames(JumpRecord(SpacetimeEvent(0, 0), SpacetimeEvent(1, 3)))
        assert rep.duplication_frame_exists
        assert rep.velocity == pytest.approx(1 / 3, abs=1e-15)
        assert rep.common_time == pytest.approx(0.0, abs=1e-15)

    def test_timelike_jump(self):
        rep = analyze_jump_frames(JumpRecord(SpacetimeEvent(0, 0), SpacetimeEvent(2, 1)))
        assert rep.interval is IntervalClass.TIMELIKE
        assert not rep.duplication_frame_exists and rep.velocity is None

    def test_lightlike_jump(self):
        rep = analyze_jump_frames(JumpRecord(SpacetimeEvent(0, 0), SpacetimeEvent(1, 1)))
        assert rep.interval is IntervalClass.LIGHTLIKE
        assert not rep.duplication_frame_exists

    def test_backwards_jump_rejected(self):
        with pytest.raises(RdmError):
            JumpRecord(SpacetimeEvent(1, 0), SpacetimeEvent(0, 5))

    def test_partner_landing(self):
        j1 = JumpRecord(SpacetimeEvent(1, 1), SpacetimeEvent(1.5, 1.2))
        j2 = JumpRecord(SpacetimeEvent(1.8, 3.5), SpacetimeEvent(2, 4), particle="2")
        rep = analyze_jump_frames(j1, partner=j2)
        assert rep.entanglement_violation_frame
        assert rep.partner_landing_time == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert rep.common_time == pytest.approx(rep.partner_landing_time, abs=1e-12)

    @settings(max_examples=100)
    @given(st.floats(-20, 20), st.floats(-20, 20), st.floats(0, 5), st.floats(0.1, 30))
    def test_consistent_with_boost(self, t0, x0, dt, dx):
        j = JumpRecord(SpacetimeEvent(t0, x0), SpacetimeEvent(t0 + dt, x0 + dx))
        rep = analyze_jump_frames(j)
        ref = brute_force_simultaneity((t0, x0), (t0 + dt, x0 + dx))
        if rep.duplication_frame_exists:
            assert ref is not None
            f = Frame(rep.velocity)
            scale = max(1.0, abs(t0), abs(x0) + dx) * f.gamma
            assert abs(boost(j.arrival, f).t - rep.common_time) <= 1e-12 * scale * 10
            assert rep.velocity == pytest.approx(ref, abs=1e-9)
        elif rep.interval is IntervalClass.TIMELIKE:
            assert ref is None
