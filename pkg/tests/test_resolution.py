import numpy as np
import pytest

import commaug.resolution as res
from commaug.community import CommunityResult, from_labels
from commaug.errors import ConfigError, SearchStalledWarning
from commaug.resolution import (
    ResolutionProfile,
    SearchConfig,
    adaptive_search,
    estimate_slope,
    load_profile,
    save_profile,
    select_by_qmin,
)
from commaug.synth import SbmSpec, generate


@pytest.fixture
def sbm():
    g, _ = generate(SbmSpec(n=250, blocks=4, p_in=0.25, p_out=0.01, seed=7))
    return g


class TestEstimateSlope:
    def test_two_points(self):
        assert estimate_slope([(0.5, 0.8), (1.0, 0.7)]) == pytest.approx(-0.2)

    def test_uses_last_two_only(self):
        assert estimate_slope([(0.5, 0.9), (1.0, 0.8), (2.0, 0.6)]) == pytest.approx(-0.2)

    def test_constant_history_zero(self):
        assert estimate_slope([(0.5, 0.4), (1.0, 0.4)]) == 0.0

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            estimate_slope([(1.0, 0.5)])


class TestSearchConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            SearchConfig(q_min=1.5)
        with pytest.raises(ConfigError):
            SearchConfig(delta_max=0.0)
        with pytest.raises(ConfigError):
            SearchConfig(gap_range=(0.1, 0.05))
        with pytest.raises(ConfigError):
            SearchConfig(gap_range=(0.0, 0.05))
        with pytest.raises(ConfigError):
            SearchConfig(max_iterations=0)
        with pytest.raises(ConfigError):
            SearchConfig(resolutions=())


def fake_louvain(q_of_gamma):
    """Stub detector with a scripted Q(gamma); partition is irrelevant."""
    calls = []

    def run(g, gamma, seed, restarts=1):
        calls.append(gamma)
        part = from_labels(np.arange(4))
        return CommunityResult(gamma=float(gamma), partition=part, Q=q_of_gamma(gamma))

    return run, calls


class TestAdaptiveSearch:
    def test_retained_meet_qmin_and_ascend(self, sbm):
        cfg = SearchConfig(q_min=0.2, delta_max=0.15, seed=1)
        profile = adaptive_search(sbm, cfg)
        assert len(profile) >= 2
        gammas = profile.gammas
        assert all(b > a for a, b in zip(gammas, gammas[1:]))
        assert all(e.Q >= cfg.q_min for e in profile.entries)

    def test_reproducible(self, sbm):
        cfg = SearchConfig(q_min=0.3, delta_max=0.15, seed=3)
        p1 = adaptive_search(sbm, cfg)
        p2 = adaptive_search(sbm, cfg)
        assert p1.gammas == p2.gammas
        for a, b in zip(p1.entries, p2.entries):
            assert a.Q == b.Q
            assert a.partition.assign.tobytes() == b.partition.assign.tobytes()

    def test_qmin_one_retains_nothing(self, sbm):
        profile = adaptive_search(sbm, SearchConfig(q_min=1.0))
        assert len(profile) == 0
        assert len(profile.diagnostics.tested) == 2  # only the two initial points

    def test_interpolation_goes_strictly_inside(self, monkeypatch, sbm):
        # big first gap: the third tested gamma must be the midpoint 0.75
        run, calls = fake_louvain(lambda g: {0.5: 0.9, 1.0: 0.3}.get(g, 0.05))
        monkeypatch.setattr(res, "louvain", run)
        cfg = SearchConfig(q_min=0.2, delta_max=0.2, max_iterations=3)
        adaptive_search(sbm, cfg)
        assert calls[2] == pytest.approx(0.75)
        assert 0.5 < calls[2] < 1.0

    def test_extrapolation_targets_drop_range(self, monkeypatch, sbm):
        # gentle slope, no gap: next gamma extrapolates beyond the frontier
        run, calls = fake_louvain(lambda g: max(0.05, 0.8 - 0.1 * g))
        monkeypatch.setattr(res, "louvain", run)
        cfg = SearchConfig(
            q_min=0.5, delta_max=0.3, gap_range=(0.05, 0.05), max_iterations=2
        )
        adaptive_search(sbm, cfg)
        # slope -0.1, drop 0.05: gamma_new = 1.0 + 0.05/0.1 = 1.5
        assert calls[2] == pytest.approx(1.5)

    def test_stall_on_flat_profile(self, monkeypatch, sbm):
        run, _ = fake_louvain(lambda g: 0.7)
        monkeypatch.setattr(res, "louvain", run)
        cfg = SearchConfig(q_min=0.1, delta_max=0.5)
        with pytest.warns(SearchStalledWarning):
            profile = adaptive_search(sbm, cfg)
        assert profile.diagnostics.stalled
        assert len(profile) == 2  # both initial points retained, Q=0.7 >= 0.1

    def test_duplicate_proposal_stops(self, monkeypatch, sbm):
        # rising Q: positive slope sends the proposal back onto gamma=0.5
        run, calls = fake_louvain(lambda g: 0.5 + 0.1 * g)
        monkeypatch.setattr(res, "louvain", run)
        cfg = SearchConfig(q_min=0.1, delta_max=0.5, gap_range=(0.05, 0.05))
        profile = adaptive_search(sbm, cfg)
        assert profile.diagnostics.duplicate_proposals == 1
        assert len(calls) == 2

    def test_max_iterations_bounds_work(self, monkeypatch, sbm):
        run, calls = fake_louvain(lambda g: max(0.01, 0.9 - 0.001 * g))
        monkeypatch.setattr(res, "louvain", run)
        cfg = SearchConfig(q_min=0.05, delta_max=0.5, max_iterations=4)
        adaptive_search(sbm, cfg)
        assert len(calls) == 2 + 4

    def test_explicit_resolutions_bypass_search(self, sbm):
        cfg = SearchConfig(q_min=0.99, resolutions=(2.0, 0.5))
        profile = adaptive_search(sbm, cfg)
        assert profile.gammas == [0.5, 2.0]  # kept despite q_min

    def test_rejects_empty_graph(self):
        from commaug.graph import from_edges

        g = from_edges(np.array([]), np.array([]), None, np.zeros((3, 1)))
        with pytest.raises(Exception):
            adaptive_search(g, SearchConfig())


class TestSelectByQmin:
    def _profile(self):
        entries = tuple(
            CommunityResult(gamma=g, partition=from_labels([0, 1]), Q=q)
            for g, q in [(0.5, 0.85), (1.0, 0.81), (2.0, 0.6), (4.0, 0.2)]
        )
        return ResolutionProfile(entries=entries, config=SearchConfig())

    def test_filters(self):
        p = select_by_qmin(self._profile(), 0.8)
        assert p.gammas == [0.5, 1.0]
        assert p.config.q_min == 0.8

    def test_zero_is_noop(self):
        p = self._profile()
        assert select_by_qmin(p, 0.0).gammas == p.gammas

    def test_above_max_empties(self):
        assert len(select_by_qmin(self._profile(), 0.99)) == 0

    def test_monotone_coverage(self):
        p = self._profile()
        for lo, hi in [(0.0, 0.3), (0.3, 0.7), (0.7, 0.9)]:
            sub_hi = set(select_by_qmin(p, hi).gammas)
            sub_lo = set(select_by_qmin(p, lo).gammas)
            assert sub_hi <= sub_lo


class TestProfileIO:
    def test_round_trip(self, tmp_path, sbm):
        cfg = SearchConfig(q_min=0.3, delta_max=0.15, seed=5, gap_range=(0.02, 0.09))
        profile = adaptive_search(sbm, cfg)
        save_profile(profile, tmp_path)
        back = load_profile(tmp_path)
        assert back.gammas == profile.gammas
        assert back.config == cfg
        for a, b in zip(back.entries, profile.entries):
            assert a.Q == b.Q
            np.testing.assert_array_equal(a.partition.assign, b.partition.assign)

    def test_profile_rejects_disorder(self):
        entries = tuple(
            CommunityResult(gamma=g, partition=from_labels([0, 1]), Q=0.5)
            for g in [1.0, 0.5]
        )
        with pytest.raises(ConfigError):
            ResolutionProfile(entries=entries, config=SearchConfig())
