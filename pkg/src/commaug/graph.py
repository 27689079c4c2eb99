"""Immutable undirected graph container, on-disk formats, and structural stats.

The on-disk dataset layout is four plain files:

* ``edges.txt``    -- one ``u v [w]`` per line, whitespace separated, ``#`` comments
* ``features.csv`` -- comma separated, n rows by D columns (or ``features.atlf``,
  a binary container: magic ``ATLF1``, little-endian u64 n, u64 D, then n*D
  little-endian f32 values row-major)
* ``labels.txt``   -- one integer per line (optional)
* ``masks.txt``    -- one of ``train``/``val``/``test``/``none`` per line (optional)

Node ids are 0-based contiguous integers; the feature matrix defines n.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DataFormatError

ATLF_MAGIC = b"ATLF1"


@dataclass(frozen=True)
class Graph:
    """Undirected graph in CSR form with per-node features, labels, masks.

    The adjacency is stored symmetrically (each edge appears in both rows),
    holds no self-loops and no duplicate edges, and every weight is > 0.
    Instances are immutable and safe to share across workers.
    """

    n: int
    indptr: np.ndarray  # int64, length n+1
    indices: np.ndarray  # int64, both directions of every edge
    weights: np.ndarray  # float64, aligned with indices
    X: np.ndarray  # (n, D)
    y: np.ndarray | None = None  # int64 labels in {0..C-1}
    train_mask: np.ndarray | None = None
    val_mask: np.ndarray | None = None
    test_mask: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return self.indices.size // 2

    @property
    def num_features(self) -> int:
        return self.X.shape[1]

    @property
    def num_classes(self) -> int:
        if self.y is None:
            raise DataFormatError("graph has no labels")
        return int(self.y.max()) + 1 if self.y.size else 0

    @property
    def degrees(self) -> np.ndarray:
        """Unweighted degree per node."""
        return np.diff(self.indptr)

    @property
    def strength(self) -> np.ndarray:
        """Weighted degree per node (equals ``degrees`` when unweighted)."""
        return np.add.reduceat(
            np.concatenate([self.weights, [0.0]]), self.indptr[:-1]
        ) * (np.diff(self.indptr) > 0)

    @property
    def total_weight(self) -> float:
        """Total edge weight (equals ``m`` when unweighted)."""
        return float(self.weights.sum()) / 2.0

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def adjacency(self) -> sp.csr_matrix:
        """Sparse adjacency view (copies the weight array)."""
        return sp.csr_matrix(
            (self.weights.copy(), self.indices, self.indptr), shape=(self.n, self.n)
        )

    def edge_array(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once, as (u, v, w) arrays with u < v."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return src[keep], self.indices[keep], self.weights[keep]


def from_edges(
    u: np.ndarray,
    v: np.ndarray,
    w: np.ndarray | None,
    X: np.ndarray,
    y: np.ndarray | None = None,
    masks: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> Graph:
    """Build a normalized Graph from raw (possibly messy) edge arrays.

    Drops self-loops, merges duplicate and reversed edges (first weight wins),
    and records the cleanup counts in ``Graph.meta``.
    """
    n = X.shape[0]
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    raw_edges = int(u.size)
    w = np.ones(u.size, dtype=np.float64) if w is None else np.asarray(w, np.float64)
    if u.size and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n):
        bad = int(max(u.max(initial=0), v.max(initial=0)))
        raise DataFormatError(f"node id out of range: {bad} with n={n}")

    self_loop = u == v
    n_self = int(self_loop.sum())
    u, v, w = u[~self_loop], v[~self_loop], w[~self_loop]

    lo, hi = np.minimum(u, v), np.maximum(u, v)
    order = np.lexsort((hi, lo))  # stable: first occurrence wins on duplicates
    lo, hi, w = lo[order], hi[order], w[order]
    if lo.size:
        new = np.concatenate([[True], (np.diff(lo) != 0) | (np.diff(hi) != 0)])
    else:
        new = np.zeros(0, dtype=bool)
    n_dup = int((~new).sum())
    lo, hi, w = lo[new], hi[new], w[new]

    both_u = np.concatenate([lo, hi])
    both_v = np.concatenate([hi, lo])
    both_w = np.concatenate([w, w])
    csr = sp.csr_matrix((both_w, (both_u, both_v)), shape=(n, n))
    csr.sort_indices()

    g = Graph(
        n=n,
        indptr=csr.indptr.astype(np.int64),
        indices=csr.indices.astype(np.int64),
        weights=csr.data.astype(np.float64),
        X=X,
        y=y,
        train_mask=masks[0] if masks else None,
        val_mask=masks[1] if masks else None,
        test_mask=masks[2] if masks else None,
        meta={
            "raw_edges": raw_edges,
            "self_loops_dropped": n_self,
            "duplicates_merged": n_dup,
            "m": int(lo.size),
        },
    )
    _validate(g)
    return g


def _validate(g: Graph) -> None:
    if g.weights.size and g.weights.min() <= 0:
        raise DataFormatError("edge weights must be > 0")
    if g.y is not None:
        if g.y.shape[0] != g.n:
            raise DataFormatError(f"label count {g.y.shape[0]} != n={g.n}")
        if g.y.size and g.y.min() < 0:
            raise DataFormatError(f"label out of range: {int(g.y.min())}")
    present = [m for m in (g.train_mask, g.val_mask, g.test_mask) if m is not None]
    for m in present:
        if m.shape[0] != g.n:
            raise DataFormatError(f"mask length {m.shape[0]} != n={g.n}")
    if len(present) == 3 and np.any(present[0] & present[1] | present[0] & present[2] | present[1] & present[2]):
        raise DataFormatError("train/val/test masks overlap")


# ---------------------------------------------------------------------------
# readers


def _parse_edge_file(path) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    us, vs, ws = [], [], []
    any_weight = False
    with open(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) not in (2, 3):
                raise DataFormatError("expected 'u v [w]'", path, lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise DataFormatError("non-numeric edge entry", path, lineno) from None
            if len(parts) == 3:
                any_weight = True
                if not np.isfinite(w) or w <= 0:
                    raise DataFormatError(f"edge weight must be > 0, got {w}", path, lineno)
            us.append(u)
            vs.append(v)
            ws.append(w)
    u = np.array(us, dtype=np.int64)
    v = np.array(vs, dtype=np.int64)
    w = np.array(ws, dtype=np.float64) if any_weight else None
    return u, v, w


def read_features(path) -> np.ndarray:
    """Read a feature matrix from CSV text or the ATLF1 binary container."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(len(ATLF_MAGIC))
    if head == ATLF_MAGIC:
        return read_atlf(path)
    try:
        X = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise DataFormatError(f"bad CSV feature file: {exc}", path) from None
    return X


def _read_labels(path, n) -> np.ndarray:
    vals = []
    with open(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                vals.append(int(s))
            except ValueError:
                raise DataFormatError("labels must be integers", path, lineno) from None
    y = np.array(vals, dtype=np.int64)
    if y.shape[0] != n:
        raise DataFormatError(f"label count {y.shape[0]} != n={n}", path)
    if y.size and y.min() < 0:
        raise DataFormatError(f"label out of range: {int(y.min())}", path)
    return y


_MASK_TOKENS = {"train": 0, "val": 1, "test": 2, "none": 3}


def _read_masks(path, n):
    codes = []
    with open(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if s not in _MASK_TOKENS:
                raise DataFormatError(f"unknown mask token {s!r}", path, lineno)
            codes.append(_MASK_TOKENS[s])
    codes = np.array(codes, dtype=np.int64)
    if codes.shape[0] != n:
        raise DataFormatError(f"mask count {codes.shape[0]} != n={n}", path)
    return codes == 0, codes == 1, codes == 2


def load_graph(edge_path, feature_path, label_path=None, mask_path=None) -> Graph:
    """Load a dataset from its on-disk files into a normalized Graph.

    Self-loops are dropped and duplicate/reversed edges merged; the counts
    are available in ``Graph.meta``.
    """
    X = read_features(feature_path)
    n = X.shape[0]
    u, v, w = _parse_edge_file(edge_path)
    y = _read_labels(label_path, n) if label_path else None
    masks = _read_masks(mask_path, n) if mask_path else None
    return from_edges(u, v, w, X, y=y, masks=masks)


def load_dataset(directory) -> Graph:
    """Load from a directory holding edges.txt, features.csv|.atlf, labels/masks."""
    d = Path(directory)
    feat = d / "features.csv"
    if not feat.exists():
        feat = d / "features.atlf"
    if not feat.exists():
        raise DataFormatError("no features.csv or features.atlf", d)
    labels = d / "labels.txt"
    masks = d / "masks.txt"
    return load_graph(
        d / "edges.txt",
        feat,
        labels if labels.exists() else None,
        masks if masks.exists() else None,
    )


# ---------------------------------------------------------------------------
# writers


def write_atlf(path, M: np.ndarray) -> None:
    M = np.ascontiguousarray(M, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(ATLF_MAGIC)
        fh.write(struct.pack("<QQ", M.shape[0], M.shape[1]))
        fh.write(M.tobytes())


def read_atlf(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(len(ATLF_MAGIC))
        if magic != ATLF_MAGIC:
            raise DataFormatError("bad ATLF1 magic", path)
        n, d = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(n * d * 4), dtype="<f4")
        if data.size != n * d:
            raise DataFormatError("truncated ATLF1 payload", path)
    return data.reshape(n, d).astype(np.float32)


def save_dataset(g: Graph, directory, features_format: str = "csv") -> None:
    """Write a Graph back to the four-file dataset layout."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    eu, ev, ew = g.edge_array()
    weighted = not np.all(ew == 1.0)
    with open(d / "edges.txt", "wt", encoding="utf-8") as fh:
        for i in range(eu.size):
            if weighted:
                fh.write(f"{eu[i]} {ev[i]} {ew[i]:.17g}\n")
            else:
                fh.write(f"{eu[i]} {ev[i]}\n")
    if features_format == "atlf":
        write_atlf(d / "features.atlf", g.X)
    else:
        np.savetxt(d / "features.csv", g.X, delimiter=",", fmt="%.17g")
    if g.y is not None:
        np.savetxt(d / "labels.txt", g.y, fmt="%d")
    if g.train_mask is not None:
        names = np.full(g.n, "none", dtype=object)
        names[g.train_mask] = "train"
        names[g.val_mask] = "val"
        names[g.test_mask] = "test"
        (d / "masks.txt").write_text("\n".join(names) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# structural statistics


def edge_homophily(g: Graph) -> float:
    """Fraction of undirected edges whose endpoints share a label."""
    if g.y is None:
        raise DataFormatError("edge homophily requires labels")
    if g.m == 0:
        raise DataFormatError("edge homophily undefined on an empty edge set")
    eu, ev, _ = g.edge_array()
    return float(np.mean(g.y[eu] == g.y[ev]))


def neighbor_mean_features(g: Graph) -> np.ndarray:
    """Weighted mean of neighbor feature rows; isolated nodes get zero rows."""
    nf = g.adjacency() @ g.X.astype(np.float64)
    s = g.strength
    nz = s > 0
    nf[nz] /= s[nz, None]
    nf[~nz] = 0.0
    return nf
