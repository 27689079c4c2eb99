"""Planted-partition generator with a label-alignment knob.

Edges follow a standard stochastic block model (p_in within blocks, p_out
across), while labels copy the block's canonical label with probability
``alignment`` and otherwise draw uniformly from the remaining classes. At
alignment 1 the community structure carries the labels outright; at
alignment 1/blocks the labels are independent of the blocks. Holding the
edges fixed while varying only label alignment isolates how informative
the partition is about the classes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .community.partition import Partition, from_labels
from .errors import ConfigError
from .graph import Graph, from_edges


@dataclass(frozen=True)
class SbmSpec:
    n: int
    blocks: int
    p_in: float
    p_out: float
    alignment: float = 1.0
    feature_noise: float = 0.0
    seed: int = 0
    label_signal: bool = True  # False: features are pure noise

    def __post_init__(self):
        if self.n < 2 or self.blocks < 1 or self.blocks > self.n:
            raise ConfigError("need n >= 2 and 1 <= blocks <= n")
        if not (0.0 <= self.p_out <= self.p_in <= 1.0):
            raise ConfigError("need 0 <= p_out <= p_in <= 1")
        if not (0.0 <= self.alignment <= 1.0):
            raise ConfigError("alignment must be in [0, 1]")
        if self.feature_noise < 0:
            raise ConfigError("feature_noise must be >= 0")


def _distinct_indices(rng, population, count):
    """``count`` distinct uniform draws from range(population), sparse-friendly."""
    if count * 2 >= population:
        return rng.permutation(population)[:count]
    picks = np.unique(rng.integers(0, population, size=int(count * 1.1) + 8))
    while picks.size < count:
        extra = rng.integers(0, population, size=count - picks.size + 8)
        picks = np.unique(np.concatenate([picks, extra]))
    return rng.permutation(picks)[:count]


def _sample_block_pairs(rng, rows, cols, p, same_block):
    """Bernoulli(p) edge sampling for one block pair: a binomial count, then
    that many distinct uniform pair indices (exactly the G(n, p) law)."""
    n_pairs = (
        rows.size * (rows.size - 1) // 2 if same_block else rows.size * cols.size
    )
    if n_pairs == 0 or p == 0.0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    count = rng.binomial(n_pairs, p)
    if count == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    picks = _distinct_indices(rng, n_pairs, count)
    if same_block:
        # unrank upper-triangle pair index to (i, j), i > j
        i = (np.floor((1 + np.sqrt(8 * picks.astype(np.float64) + 1)) / 2)).astype(np.int64)
        j = picks - i * (i - 1) // 2
        return rows[i], rows[j]
    return rows[picks // cols.size], cols[picks % cols.size]


def generate(spec: SbmSpec) -> tuple[Graph, Partition]:
    """Sample a graph from the spec; also returns the planted partition."""
    rng = np.random.default_rng(spec.seed)
    n, k = spec.n, spec.blocks
    if spec.p_out == 0.0 and k > 1:
        warnings.warn(
            "p_out = 0 with multiple blocks: graph will be disconnected",
            stacklevel=2,
        )

    block = np.repeat(np.arange(k), np.diff(np.linspace(0, n, k + 1).astype(int)))
    members = [np.flatnonzero(block == b) for b in range(k)]

    us, vs = [], []
    for b1 in range(k):
        u, v = _sample_block_pairs(rng, members[b1], members[b1], spec.p_in, True)
        us.append(u)
        vs.append(v)
        for b2 in range(b1 + 1, k):
            u, v = _sample_block_pairs(rng, members[b1], members[b2], spec.p_out, False)
            us.append(u)
            vs.append(v)
    u = np.concatenate(us)
    v = np.concatenate(vs)

    labels = block.copy()
    flip = rng.random(n) >= spec.alignment
    if flip.any() and k > 1:
        # uniform over the other k-1 classes, so alignment = 1/k is independence
        offset = rng.integers(1, k, size=int(flip.sum()))
        labels[flip] = (labels[flip] + offset) % k

    X = rng.normal(0.0, 1.0, size=(n, k)) * spec.feature_noise
    if spec.label_signal:
        X[np.arange(n), labels] += 1.0

    order = rng.permutation(n)
    masks = (np.zeros(n, bool), np.zeros(n, bool), np.zeros(n, bool))
    n_train = int(0.6 * n)
    n_val = int(0.2 * n)
    masks[0][order[:n_train]] = True
    masks[1][order[n_train : n_train + n_val]] = True
    masks[2][order[n_train + n_val :]] = True

    g = from_edges(u, v, None, X, y=labels.astype(np.int64), masks=masks)
    return g, from_labels(block)
