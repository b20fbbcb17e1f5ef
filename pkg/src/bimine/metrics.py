"""Ranking quality: AUC (rank-sum, ties count half) and best F1."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

__all__ = ["LabeledRanking", "auc", "best_f1", "f1_at"]


class LabeledRanking:
    """Parallel arrays of scores and 0/1 labels."""

    __slots__ = ("scores", "labels")

    def __init__(self, scores: Sequence[float] | np.ndarray, labels: Sequence[int] | np.ndarray):
        self.scores = np.asarray(scores, dtype=np.float64)
        self.labels = np.asarray(labels).astype(np.int64)
        if self.scores.shape != self.labels.shape or self.scores.ndim != 1:
            raise ValueError("scores and labels must be 1-d and of equal length")
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return int(self.labels.size - self.labels.sum())


def _coerce(lr, labels) -> LabeledRanking:
    if isinstance(lr, LabeledRanking):
        return lr
    return LabeledRanking(lr, labels)


def auc(lr, labels=None) -> float:
    """Probability that a random positive outscores a random negative.

    Accepts a :class:`LabeledRanking` or ``(scores, labels)``.
    """
    lr = _coerce(lr, labels)
    pos, neg = lr.n_pos, lr.n_neg
    if pos == 0 or neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    _, inverse, counts = np.unique(lr.scores, return_inverse=True, return_counts=True)
    # mid-rank of each distinct score (1-based)
    upper = np.cumsum(counts)
    mid = upper - (counts - 1) / 2.0
    rank_sum = float(mid[inverse][lr.labels == 1].sum())
    return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg)


def f1_at(lr, threshold: float, labels=None) -> float:
    """F1 when predicting positive for ``score >= threshold``."""
    lr = _coerce(lr, labels)
    pred = lr.scores >= threshold
    tp = int((pred & (lr.labels == 1)).sum())
    if tp == 0:
        return 0.0
    return 2.0 * tp / (int(pred.sum()) + lr.n_pos)


def best_f1(lr, labels=None) -> float:
    """Maximum F1 over thresholds at each distinct observed score."""
    lr = _coerce(lr, labels)
    pos = lr.n_pos
    if pos == 0:
        raise ValueError("best F1 needs at least one positive")
    order = np.argsort(-lr.scores, kind="stable")
    s = lr.scores[order]
    tp = np.cumsum(lr.labels[order])
    # last index of each run of equal scores = threshold at that score
    last = np.nonzero(np.append(s[1:] != s[:-1], True))[0]
    tp_at = tp[last]
    predicted = last + 1
    f1 = 2.0 * tp_at / (predicted + pos)
    return float(f1.max())
