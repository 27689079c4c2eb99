import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commaug.community import CommunityResult, from_labels
from commaug.features import (
    AugmentedDesign,
    ProjectionParams,
    build_design,
    init_projection,
    one_hot,
    project,
)
from commaug.resolution import ResolutionProfile, SearchConfig

from conftest import build_graph, random_partition


def make_profile(assignments, gammas=None, q=0.5):
    gammas = gammas or [float(i + 1) for i in range(len(assignments))]
    entries = tuple(
        CommunityResult(gamma=g, partition=from_labels(a), Q=q)
        for g, a in zip(gammas, assignments)
    )
    return ResolutionProfile(entries=entries, config=SearchConfig())


class TestOneHot:
    def test_small_assignment(self):
        h = one_hot(from_labels([0, 1, 0])).toarray()
        np.testing.assert_array_equal(h, [[1, 0], [0, 1], [1, 0]])

    def test_single_block_all_ones_column(self):
        h = one_hot(from_labels([0, 0, 0, 0])).toarray()
        np.testing.assert_array_equal(h, np.ones((4, 1)))

    def test_row_sums_one(self):
        rng = np.random.default_rng(2)
        p = random_partition(rng, 30)
        assert (one_hot(p).sum(axis=1) == 1).all()


class TestProject:
    def test_identity_projection_matches_one_hot(self):
        p = from_labels([0, 1, 2, 1])
        np.testing.assert_array_equal(project(p, np.eye(3)), one_hot(p).toarray())

    def test_single_community_repeats_row(self):
        p = from_labels([0, 0, 0])
        W = np.array([[1.5, -2.0]])
        out = project(p, W)
        np.testing.assert_array_equal(out, np.tile(W, (3, 1)))

    def test_matches_dense_product(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(2, 1000))
            p = random_partition(rng, n)
            W = rng.normal(size=(p.K, 3))
            dense = one_hot(p).toarray() @ W
            np.testing.assert_allclose(project(p, W), dense, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            project(from_labels([0, 1]), np.zeros((3, 2)))


class TestBuildDesign:
    def test_empty_profile_is_raw_features(self):
        g = build_graph([0, 1], [1, 2], D=4)
        profile = make_profile([])
        params = ProjectionParams(weights=[], d_c=16, gammas=())
        design = build_design(g, profile, params)
        assert design.width == 4
        np.testing.assert_array_equal(design.Z, g.X.astype(np.float64))

    def test_width_law(self):
        rng = np.random.default_rng(3)
        g = build_graph([0, 1, 2], [1, 2, 3], D=5)
        for T in (0, 1, 3):
            for nf in (False, True):
                assignments = [rng.integers(0, 2, 4) for _ in range(T)]
                profile = make_profile(assignments)
                params = init_projection(profile, d_c=7, seed=0)
                design = build_design(g, profile, params, nf=nf)
                assert design.width == (10 if nf else 5) + T * 7

    def test_x_block_bit_identical(self):
        from commaug.graph import from_edges

        rng = np.random.default_rng(4)
        g = from_edges(np.array([0, 1]), np.array([1, 2]), None, rng.normal(size=(3, 6)))
        profile = make_profile([rng.integers(0, 2, 3)])
        params = init_projection(profile, d_c=2, seed=1)
        design = build_design(g, profile, params)
        assert np.array_equal(design.columns("x"), g.X)

    def test_nf_block_present_when_enabled(self):
        g = build_graph([0, 1], [1, 2], D=2)
        profile = make_profile([])
        params = ProjectionParams(weights=[], d_c=4, gammas=())
        design = build_design(g, profile, params, nf=True)
        assert design.width == 4
        assert design.columns("nf").shape == (3, 2)

    def test_param_profile_mismatch(self):
        g = build_graph([0, 1], [1, 2])
        profile = make_profile([[0, 1, 0]])
        params = ProjectionParams(weights=[], d_c=4, gammas=())
        with pytest.raises(ValueError):
            build_design(g, profile, params)

    def test_gamma_blocks_in_ascending_order(self):
        g = build_graph([0, 1], [1, 2], D=1)
        profile = make_profile([[0, 1, 0], [0, 1, 2]], gammas=[0.5, 2.0])
        params = init_projection(profile, d_c=2, seed=5)
        design = build_design(g, profile, params)
        np.testing.assert_array_equal(
            design.columns("gamma=0.5"), project(profile.entries[0].partition, params.weights[0])
        )
        np.testing.assert_array_equal(
            design.columns("gamma=2.0"), project(profile.entries[1].partition, params.weights[1])
        )

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_relabel_invariance(self, seed):
        # permuting community ids together with W rows leaves Z unchanged
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 30))
        p = random_partition(rng, n)
        W = rng.normal(size=(p.K, 4))
        perm = rng.permutation(p.K)
        inv = np.argsort(perm)
        p_relabeled = from_labels(perm[p.assign])
        # from_labels compacts sorted, so the row order of W must follow inv
        np.testing.assert_allclose(project(p_relabeled, W[inv]), project(p, W), atol=0)


def test_init_projection_bounds():
    profile = make_profile([[0, 1, 2, 3], [0, 0, 1, 1]])
    params = init_projection(profile, d_c=8, seed=3)
    for w, entry in zip(params.weights, profile.entries):
        bound = 1.0 / np.sqrt(entry.partition.K)
        assert w.shape == (entry.partition.K, 8)
        assert np.all(np.abs(w) <= bound)
