"""Seeded Louvain community detection with a resolution parameter."""

from ._backend import BACKEND
from .louvain import louvain, modularity
from .partition import (
    CommunityResult,
    Partition,
    from_labels,
    load_community,
    save_community,
    singletons,
)

__all__ = [
    "BACKEND",
    "CommunityResult",
    "Partition",
    "from_labels",
    "load_community",
    "louvain",
    "modularity",
    "save_community",
    "singletons",
]
