import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commaug.errors import DataFormatError
from commaug.graph import (
    edge_homophily,
    from_edges,
    load_graph,
    neighbor_mean_features,
    read_atlf,
    save_dataset,
    load_dataset,
    write_atlf,
)

from conftest import build_graph


def write_dataset(tmp_path, edges, features, labels=None, masks=None):
    (tmp_path / "edges.txt").write_text(edges)
    (tmp_path / "features.csv").write_text(features)
    paths = [tmp_path / "edges.txt", tmp_path / "features.csv", None, None]
    if labels is not None:
        (tmp_path / "labels.txt").write_text(labels)
        paths[2] = tmp_path / "labels.txt"
    if masks is not None:
        (tmp_path / "masks.txt").write_text(masks)
        paths[3] = tmp_path / "masks.txt"
    return paths


class TestLoadGraph:
    def test_triangle(self, tmp_path):
        paths = write_dataset(tmp_path, "0 1\n1 2\n0 2\n", "0,0\n0,0\n0,0\n")
        g = load_graph(*paths)
        assert g.n == 3
        assert g.m == 3
        assert list(g.degrees) == [2, 2, 2]

    def test_reversed_duplicate_collapses(self, tmp_path):
        paths = write_dataset(tmp_path, "0 1\n1 0\n", "0\n0\n")
        g = load_graph(*paths)
        assert g.m == 1
        assert g.meta["duplicates_merged"] == 1

    def test_self_loop_dropped_and_counted(self, tmp_path):
        paths = write_dataset(tmp_path, "0 0\n0 1\n", "0\n0\n")
        g = load_graph(*paths)
        assert g.m == 1
        assert g.meta["self_loops_dropped"] == 1

    def test_comments_and_weights(self, tmp_path):
        paths = write_dataset(tmp_path, "# header\n0 1 2.5\n\n1 2 1.0\n", "0\n0\n0\n")
        g = load_graph(*paths)
        assert g.total_weight == pytest.approx(3.5)

    def test_malformed_line_reports_number(self, tmp_path):
        paths = write_dataset(tmp_path, "0 1\nbad line here x\n", "0\n0\n")
        with pytest.raises(DataFormatError) as exc:
            load_graph(*paths)
        assert exc.value.line == 2

    def test_id_out_of_range(self, tmp_path):
        paths = write_dataset(tmp_path, "0 5\n", "0\n0\n")
        with pytest.raises(DataFormatError, match="out of range"):
            load_graph(*paths)

    def test_label_count_mismatch(self, tmp_path):
        paths = write_dataset(tmp_path, "0 1\n", "0\n0\n", labels="1\n")
        with pytest.raises(DataFormatError, match="label count"):
            load_graph(*paths)

    def test_negative_label_rejected(self, tmp_path):
        paths = write_dataset(tmp_path, "0 1\n", "0\n0\n", labels="0\n-1\n")
        with pytest.raises(DataFormatError, match="label out of range"):
            load_graph(*paths)

    def test_nonpositive_weight_rejected(self, tmp_path):
        paths = write_dataset(tmp_path, "0 1 0.0\n", "0\n0\n")
        with pytest.raises(DataFormatError):
            load_graph(*paths)

    def test_masks_parse_disjoint(self, tmp_path):
        paths = write_dataset(
            tmp_path, "0 1\n", "0\n0\n0\n", masks="train\nval\nnone\n"
        )
        g = load_graph(*paths)
        assert g.train_mask.sum() == 1
        assert g.val_mask.sum() == 1
        assert g.test_mask.sum() == 0

    def test_degree_sum_is_twice_edges(self, tmp_path):
        rng = np.random.default_rng(3)
        u = rng.integers(0, 40, 200)
        v = rng.integers(0, 40, 200)
        g = build_graph(u, v, n=40)
        assert g.degrees.sum() == 2 * g.m


class TestAtlf:
    def test_round_trip(self, tmp_path):
        M = np.arange(12, dtype=np.float32).reshape(3, 4)
        write_atlf(tmp_path / "m.atlf", M)
        back = read_atlf(tmp_path / "m.atlf")
        assert back.dtype == np.float32
        np.testing.assert_array_equal(back, M)

    def test_loader_detects_binary_features(self, tmp_path):
        write_atlf(tmp_path / "features.atlf", np.ones((2, 3), dtype=np.float32))
        (tmp_path / "edges.txt").write_text("0 1\n")
        g = load_graph(tmp_path / "edges.txt", tmp_path / "features.atlf")
        assert g.X.shape == (2, 3)

    def test_bad_magic(self, tmp_path):
        (tmp_path / "bad.atlf").write_bytes(b"NOPE!" + b"\0" * 16)
        with pytest.raises(DataFormatError, match="magic"):
            read_atlf(tmp_path / "bad.atlf")


def test_dataset_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    u = rng.integers(0, 25, 60)
    v = rng.integers(0, 25, 60)
    X = rng.normal(size=(25, 4))
    y = rng.integers(0, 3, 25)
    masks = np.zeros(25, dtype=bool), np.zeros(25, dtype=bool), np.zeros(25, dtype=bool)
    masks[0][:15] = True
    masks[1][15:20] = True
    masks[2][20:] = True
    g = from_edges(u, v, None, X, y=y.astype(np.int64), masks=masks)
    save_dataset(g, tmp_path)
    back = load_dataset(tmp_path)
    assert back.n == g.n and back.m == g.m
    np.testing.assert_array_equal(back.indices, g.indices)
    np.testing.assert_allclose(back.X, g.X, rtol=0, atol=0)
    np.testing.assert_array_equal(back.y, g.y)
    np.testing.assert_array_equal(back.train_mask, g.train_mask)


class TestEdgeHomophily:
    def test_bridged_triangles(self, bridged_triangles):
        assert edge_homophily(bridged_triangles) == pytest.approx(6 / 7)

    def test_single_label_is_one(self):
        g = build_graph([0, 1], [1, 2], y=[0, 0, 0])
        assert edge_homophily(g) == 1.0

    def test_requires_labels(self, two_triangles):
        with pytest.raises(DataFormatError):
            edge_homophily(two_triangles)

    def test_empty_edge_set_rejected(self):
        g = from_edges(np.array([]), np.array([]), None, np.zeros((3, 1)),
                       y=np.zeros(3, dtype=np.int64))
        with pytest.raises(DataFormatError):
            edge_homophily(g)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_invariant_under_label_permutation(self, seed):
        rng = np.random.default_rng(seed)
        u = rng.integers(0, 12, 30)
        v = rng.integers(0, 12, 30)
        if not np.any(u != v):
            return
        y = rng.integers(0, 4, 12).astype(np.int64)
        g = build_graph(u, v, n=12, y=y)
        perm = rng.permutation(4)
        g2 = build_graph(u, v, n=12, y=perm[y])
        assert edge_homophily(g) == edge_homophily(g2)


class TestNeighborMeanFeatures:
    def test_path_graph(self):
        g = from_edges(np.array([0, 1]), np.array([1, 2]), None,
                       np.array([[1.0], [2.0], [3.0]]))
        np.testing.assert_allclose(neighbor_mean_features(g), [[2.0], [2.0], [2.0]])

    def test_isolated_node_zero_row(self):
        g = from_edges(np.array([0]), np.array([1]), None, np.ones((3, 2)))
        nf = neighbor_mean_features(g)
        np.testing.assert_array_equal(nf[2], [0.0, 0.0])

    def test_constant_features_preserved(self):
        rng = np.random.default_rng(5)
        u = rng.integers(0, 10, 30)
        v = rng.integers(0, 10, 30)
        X = np.full((10, 3), 7.25)
        g = from_edges(u, v, None, X)
        nf = neighbor_mean_features(g)
        connected = g.degrees > 0
        np.testing.assert_allclose(nf[connected], 7.25)

    @given(st.floats(-100, 100, allow_nan=False), st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_commutes_with_scaling(self, alpha, seed):
        rng = np.random.default_rng(seed)
        u = rng.integers(0, 8, 20)
        v = rng.integers(0, 8, 20)
        X = rng.normal(size=(8, 3))
        if not np.any(u != v):
            return
        g1 = from_edges(u, v, None, X)
        g2 = from_edges(u, v, None, alpha * X)
        np.testing.assert_allclose(
            neighbor_mean_features(g2), alpha * neighbor_mean_features(g1), atol=1e-12 * max(1, abs(alpha))
        )

    def test_weighted_mean(self):
        # node 0 linked to 1 (w=3) and 2 (w=1): mean = (3*10 + 1*2)/4 = 8
        g = from_edges(np.array([0, 0]), np.array([1, 2]), np.array([3.0, 1.0]),
                       np.array([[0.0], [10.0], [2.0]]))
        assert neighbor_mean_features(g)[0, 0] == pytest.approx(8.0)
