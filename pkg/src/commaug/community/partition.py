"""Node-to-community assignments and their on-disk form."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataFormatError


@dataclass(frozen=True, eq=False)
class Partition:
    """Surjective assignment of n nodes to blocks {0..K-1}.

    Every block id occurs at least once and block_sizes sums to n.
    Construct through :func:`from_labels` unless the arrays are already
    known to be dense and consistent.
    """

    assign: np.ndarray  # int64, length n
    K: int
    block_sizes: np.ndarray  # int64, length K

    @property
    def n(self) -> int:
        return self.assign.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, Partition)
            and self.K == other.K
            and np.array_equal(self.assign, other.assign)
        )

    def __hash__(self):
        return hash((self.K, self.assign.tobytes()))

    def blocks(self) -> list[np.ndarray]:
        """Member indices per block, ordered by block id."""
        order = np.argsort(self.assign, kind="stable")
        bounds = np.searchsorted(self.assign[order], np.arange(self.K + 1))
        return [order[bounds[k] : bounds[k + 1]] for k in range(self.K)]


def from_labels(values) -> Partition:
    """Relabel arbitrary hashable block ids to a dense {0..K-1} Partition."""
    values = np.asarray(values)
    if values.ndim != 1 or values.size == 0:
        raise DataFormatError("partition labels must be a non-empty 1-d sequence")
    uniq, dense = np.unique(values, return_inverse=True)
    assign = dense.astype(np.int64)
    sizes = np.bincount(assign, minlength=uniq.size).astype(np.int64)
    return Partition(assign=assign, K=int(uniq.size), block_sizes=sizes)


def singletons(n: int) -> Partition:
    ids = np.arange(n, dtype=np.int64)
    return Partition(assign=ids, K=n, block_sizes=np.ones(n, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class CommunityResult:
    """A partition found at resolution ``gamma`` with its modularity."""

    gamma: float
    partition: Partition
    Q: float

    @property
    def K(self) -> int:
        return self.partition.K


def save_community(path, result: CommunityResult) -> None:
    """Write `# gamma=<g> Q=<Q> K=<K>` then one community id per line."""
    with open(path, "wt", encoding="utf-8") as fh:
        fh.write(f"# gamma={result.gamma!r} Q={result.Q!r} K={result.K}\n")
        fh.write("\n".join(str(c) for c in result.partition.assign))
        fh.write("\n")


def load_community(path) -> CommunityResult:
    path = Path(path)
    with open(path, "rt", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise DataFormatError("missing partition header", path, 1)
        fields = dict(
            tok.split("=", 1) for tok in header.lstrip("# ").split() if "=" in tok
        )
        try:
            gamma = float(fields["gamma"])
            q = float(fields["Q"])
            k = int(fields["K"])
        except (KeyError, ValueError):
            raise DataFormatError("bad partition header", path, 1) from None
        assign = []
        for lineno, line in enumerate(fh, start=2):
            s = line.strip()
            if not s:
                continue
            try:
                assign.append(int(s))
            except ValueError:
                raise DataFormatError("community ids must be integers", path, lineno) from None
    part = from_labels(assign)
    if part.K != k:
        raise DataFormatError(f"header K={k} but file has {part.K} blocks", path)
    return CommunityResult(gamma=gamma, partition=part, Q=q)
