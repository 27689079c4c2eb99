"""Classification metrics: accuracy, binary ROC-AUC, micro-averaged F1."""

from __future__ import annotations

import numpy as np


def accuracy(logits: np.ndarray, y: np.ndarray) -> float:
    """Fraction of rows whose argmax matches the label."""
    return float(np.mean(np.argmax(logits, axis=1) == y))


def roc_auc(scores: np.ndarray, y: np.ndarray) -> float:
    """Rank statistic over positive-class scores (binary labels).

    Ties get average ranks, i.e. the Mann-Whitney U convention.
    """
    y = np.asarray(y)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC-AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty_like(scores)
    ranks[order] = np.arange(1, scores.size + 1, dtype=np.float64)
    # average ranks over tied score groups
    sorted_scores = scores[order]
    group_start = np.concatenate([[True], sorted_scores[1:] != sorted_scores[:-1]])
    group_ids = np.cumsum(group_start) - 1
    sums = np.bincount(group_ids, weights=ranks[order])
    counts = np.bincount(group_ids)
    ranks[order] = (sums / counts)[group_ids]
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def f1_micro(probs: np.ndarray, Y: np.ndarray, threshold: float = 0.5) -> float:
    """Micro F1 over thresholded per-class probabilities (multi-label)."""
    pred = probs >= threshold
    Y = Y.astype(bool)
    tp = float(np.sum(pred & Y))
    fp = float(np.sum(pred & ~Y))
    fn = float(np.sum(~pred & Y))
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0
