"""Independent brute-force oracles.

Everything here is deliberately naive (dense matrices, nested loops,
exhaustive enumeration) and shares no code with the implementations under
test.
"""

import math
from functools import lru_cache

import numpy as np


def dense_adjacency(g):
    A = np.zeros((g.n, g.n))
    for i in range(g.n):
        for idx in range(g.indptr[i], g.indptr[i + 1]):
            A[i, g.indices[idx]] = g.weights[idx]
    return A


def naive_modularity(g, assign, gamma):
    """(1/2m) * sum_ij (A_ij - gamma k_i k_j / 2m) delta(c_i, c_j)."""
    A = dense_adjacency(g)
    k = A.sum(axis=1)
    two_m = k.sum()
    q = 0.0
    for i in range(g.n):
        for j in range(g.n):
            if assign[i] == assign[j]:
                q += A[i, j] - gamma * k[i] * k[j] / two_m
    return q / two_m


@lru_cache(maxsize=None)
def all_partitions(n):
    """Every set partition of {0..n-1} as restricted-growth assignment tuples."""
    out = []

    def rec(prefix, next_free):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for c in range(next_free + 1):
            rec(prefix + [c], max(next_free, c + 1))

    rec([0], 1) if n else out.append(())
    return out


def best_partition_exhaustive(g, gamma):
    """Max modularity over all set partitions (only feasible for tiny n).

    Uses the same naive double-sum definition as :func:`naive_modularity`,
    vectorized over the enumerated assignments.
    """
    A = dense_adjacency(g)
    k = A.sum(axis=1)
    two_m = k.sum()
    M = A - gamma * np.outer(k, k) / two_m
    P = np.array(all_partitions(g.n))
    delta = P[:, :, None] == P[:, None, :]
    qs = (M[None, :, :] * delta).sum(axis=(1, 2)) / two_m
    best = int(np.argmax(qs))
    return float(qs[best]), tuple(P[best])


def mi_nested_loops(a, b):
    """Mutual information by explicitly counting every element pair of blocks."""
    a = list(a)
    b = list(b)
    n = len(a)
    blocks_a = sorted(set(a))
    blocks_b = sorted(set(b))
    total = 0.0
    for i in blocks_a:
        n_i = sum(1 for x in a if x == i)
        for j in blocks_b:
            n_j = sum(1 for x in b if x == j)
            n_ij = sum(1 for x, y in zip(a, b) if x == i and y == j)
            if n_ij:
                total += n_ij / n * math.log(n * n_ij / (n_i * n_j))
    return total


def entropy_loops(a):
    a = list(a)
    n = len(a)
    h = 0.0
    for blk in set(a):
        p = sum(1 for x in a if x == blk) / n
        h -= p * math.log(p)
    return h


def random_connected_graph(rng, n, extra_edges=0):
    """Random spanning tree plus extra random edges; returns (u, v) arrays."""
    nodes = rng.permutation(n)
    u = [int(nodes[rng.integers(0, i)]) for i in range(1, n)]
    v = [int(nodes[i]) for i in range(1, n)]
    for _ in range(extra_edges):
        a, b = rng.integers(0, n, 2)
        if a != b:
            u.append(int(a))
            v.append(int(b))
    return np.array(u), np.array(v)
