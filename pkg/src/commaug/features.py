"""Augmented design matrix: node features plus projected community columns.

Per retained resolution, the one-hot community indicator (n x K) is
projected through a trainable (K x d_c) matrix; because the indicator has a
single 1 per row, the product is a row lookup. The blocks are concatenated
in ascending-resolution order after the raw (optionally neighbor-extended)
feature columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .community.partition import Partition
from .graph import Graph, neighbor_mean_features
from .resolution import ResolutionProfile


@dataclass
class ProjectionParams:
    """One trainable (K_gamma x d_c) matrix per retained resolution."""

    weights: list[np.ndarray]
    d_c: int
    gammas: tuple[float, ...]

    def copy(self) -> "ProjectionParams":
        return ProjectionParams(
            weights=[w.copy() for w in self.weights], d_c=self.d_c, gammas=self.gammas
        )


def init_projection(profile: ResolutionProfile, d_c: int, seed: int) -> ProjectionParams:
    """Uniform +-1/sqrt(K) init per resolution, drawn in profile order."""
    if d_c < 1:
        raise ValueError(f"d_c must be >= 1, got {d_c}")
    rng = np.random.default_rng([seed, 0x70726F6A])
    weights = []
    for entry in profile.entries:
        k = entry.partition.K
        bound = 1.0 / np.sqrt(k)
        weights.append(rng.uniform(-bound, bound, size=(k, d_c)))
    return ProjectionParams(weights=weights, d_c=d_c, gammas=tuple(profile.gammas))


def one_hot(p: Partition) -> sp.csr_matrix:
    """Sparse indicator matrix with row i carrying a 1 at column assign[i]."""
    data = np.ones(p.n)
    indptr = np.arange(p.n + 1)
    return sp.csr_matrix((data, p.assign.copy(), indptr), shape=(p.n, p.K))


def project(p: Partition, W: np.ndarray) -> np.ndarray:
    """OneHot(p) @ W computed as a row lookup."""
    if W.shape[0] != p.K:
        raise ValueError(f"W has {W.shape[0]} rows, partition has {p.K} blocks")
    return W[p.assign]


@dataclass(frozen=True)
class AugmentedDesign:
    """Z = [X || E] with a column-range layout for each block."""

    Z: np.ndarray
    layout: tuple[tuple[str, int, int], ...]

    @property
    def width(self) -> int:
        return self.Z.shape[1]

    def columns(self, name: str) -> np.ndarray:
        for block, start, stop in self.layout:
            if block == name:
                return self.Z[:, start:stop]
        raise KeyError(name)


def _check_params(profile: ResolutionProfile, params: ProjectionParams) -> None:
    if len(params.weights) != len(profile.entries):
        raise ValueError(
            f"{len(params.weights)} projection matrices for {len(profile.entries)} resolutions"
        )
    if tuple(params.gammas) != tuple(profile.gammas):
        raise ValueError("projection parameters were built for different resolutions")
    for w, entry in zip(params.weights, profile.entries):
        if w.shape != (entry.partition.K, params.d_c):
            raise ValueError(
                f"projection for gamma={entry.gamma} has shape {w.shape}, "
                f"expected {(entry.partition.K, params.d_c)}"
            )


def build_design(
    g: Graph,
    profile: ResolutionProfile,
    params: ProjectionParams,
    nf: bool = False,
) -> AugmentedDesign:
    """Assemble Z = [X || NF? || E^(g1) || ... || E^(gT)].

    With an empty profile and nf=False this is exactly the raw features,
    the feature-only collapse of the model.
    """
    _check_params(profile, params)
    blocks = [("x", np.asarray(g.X, dtype=np.float64))]
    if nf:
        blocks.append(("nf", neighbor_mean_features(g)))
    for entry, w in zip(profile.entries, params.weights):
        blocks.append((f"gamma={entry.gamma!r}", project(entry.partition, w)))

    layout = []
    start = 0
    for name, mat in blocks:
        layout.append((name, start, start + mat.shape[1]))
        start += mat.shape[1]
    Z = np.concatenate([mat for _, mat in blocks], axis=1) if len(blocks) > 1 else blocks[0][1].copy()
    return AugmentedDesign(Z=Z, layout=tuple(layout))
