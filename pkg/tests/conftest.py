import numpy as np
import pytest

from commaug.graph import from_edges


def build_graph(u, v, w=None, n=None, y=None, D=1):
    """Small-graph helper: zero features unless a width is given."""
    u = np.asarray(u)
    v = np.asarray(v)
    if n is None:
        n = int(max(u.max(), v.max())) + 1
    X = np.zeros((n, D))
    y = None if y is None else np.asarray(y, dtype=np.int64)
    return from_edges(u, v, w, X, y=y)


@pytest.fixture
def two_triangles():
    """Two disjoint triangles: optimum at gamma=1 is the triangle split, Q=0.5."""
    return build_graph([0, 0, 1, 3, 3, 4], [1, 2, 2, 4, 5, 5])


@pytest.fixture
def bridged_triangles():
    """Two triangles joined by one bridge edge (m=7), one class per triangle."""
    return build_graph(
        [0, 0, 1, 3, 3, 4, 2], [1, 2, 2, 4, 5, 5, 3], y=[0, 0, 0, 1, 1, 1]
    )


def random_partition(rng, n, kmax=None):
    kmax = kmax or max(2, n // 3)
    k = int(rng.integers(1, kmax + 1))
    assign = rng.integers(0, k, n)
    from commaug.community import from_labels

    return from_labels(assign)
