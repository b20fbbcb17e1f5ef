"""Fraud-group detection on one S-tree.

A thickness/depth boundary picks the subtrees whose shared prefix is both
deep and heavy; each source is then scored by the summed ``sus`` of the
selected nodes that carry it.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .basket import DEFAULT_C, Basket, Mode, OrderSpec, basket_mass, build_baskets
from .graph import BipartiteGraph
from .stree import ROOT, STree, STreeNode, build_stree

__all__ = [
    "BoundaryParams",
    "Detection",
    "SuspiciousSet",
    "SuspiciousnessRanking",
    "default_depth",
    "default_thickness",
    "detect",
    "detect_full",
    "s_scores",
    "select_suspicious",
]


@dataclass(frozen=True)
class BoundaryParams:
    thickness: float
    depth: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.thickness):
            raise ValueError("thickness must be finite")
        if int(self.depth) != self.depth or self.depth < 1:
            raise ValueError(f"depth must be a positive integer, got {self.depth!r}")


def default_thickness(tree: STree) -> float:
    """Mean ``sus`` over all non-root nodes."""
    if tree.node_count == 0:
        raise ValueError("default thickness is undefined for an empty tree")
    return float(tree.sus[1:].sum()) / tree.node_count


def default_depth(baskets: Sequence[Basket], tree: STree) -> int:
    """``floor((|E| - |T|) / |B|)``, at least 1."""
    if not baskets:
        raise ValueError("default depth is undefined without baskets")
    saved = basket_mass(baskets) - tree.node_count
    return max(1, saved // len(baskets))


@dataclass(frozen=True, eq=False)
class SuspiciousSet:
    """Selected nodes, as a boolean mask over the tree's node indices."""

    tree: STree
    mask: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.nonzero(self.mask)[0]

    @property
    def nodes(self) -> set[STreeNode]:
        return {self.tree.node(i) for i in self.indices.tolist()}

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __le__(self, other: SuspiciousSet) -> bool:
        return bool(np.all(other.mask[self.mask]))


def select_suspicious(tree: STree, params: BoundaryParams) -> SuspiciousSet:
    """Nodes at exactly ``params.depth`` with ``sus >= thickness``, together
    with their root paths and all of their descendants."""
    mask = np.zeros(tree.sn.size, dtype=bool)
    levels = tree.levels
    d = params.depth
    if d < len(levels):
        level = levels[d]
        hits = level[tree.sus[level] >= params.thickness]
        mask[hits] = True
        if hits.size:
            for deeper in levels[d + 1 :]:
                mask[deeper] |= mask[tree.parent[deeper]]
            cur = np.unique(tree.parent[hits])
            cur = cur[cur != ROOT]
            while cur.size:
                mask[cur] = True
                cur = np.unique(tree.parent[cur])
                cur = cur[cur != ROOT]
    return SuspiciousSet(tree, mask)


@dataclass(frozen=True, eq=False)
class SuspiciousnessRanking:
    """Per-source scores with a deterministic order: score desc, label asc."""

    labels: tuple[str, ...]
    scores: np.ndarray

    @classmethod
    def from_scores(cls, labels: Sequence[str], scores: np.ndarray) -> SuspiciousnessRanking:
        scores = np.asarray(scores, dtype=np.float64)
        if scores.shape != (len(labels),):
            raise ValueError("one score per label required")
        return cls(tuple(labels), scores)

    @property
    def order(self) -> list[int]:
        """Source ids in rank order."""
        sc = self.scores.tolist()
        return sorted(range(len(self.labels)), key=lambda i: (-sc[i], self.labels[i]))

    def entries(self) -> list[tuple[str, float]]:
        sc = self.scores.tolist()
        return [(self.labels[i], sc[i]) for i in self.order]

    def score_of(self, label: str) -> float:
        return float(self.scores[self.labels.index(label)])

    def to_tsv(self) -> str:
        return "".join(f"{lab}\t{score!r}\n" for lab, score in self.entries())

    def __len__(self) -> int:
        return len(self.labels)


def s_scores(x_sus: SuspiciousSet, labels: Sequence[str] | None = None) -> SuspiciousnessRanking:
    """Sum of ``sus`` over the selected nodes labelled with each source.

    Sources that never appear in the selection score 0. ``labels``
    defaults to the tree's ``sn`` labels.
    """
    tree = x_sus.tree
    if labels is None:
        if tree.sn_labels is None:
            raise ValueError("tree has no source labels; pass labels explicitly")
        labels = tree.sn_labels
    idx = x_sus.indices
    idx = idx[idx != ROOT]
    scores = np.bincount(tree.sn[idx], weights=tree.sus[idx], minlength=len(labels))
    return SuspiciousnessRanking.from_scores(labels, scores)


@dataclass(frozen=True, eq=False)
class Detection:
    """Everything produced by one detector run."""

    baskets: list[Basket]
    tree: STree
    params: BoundaryParams
    selected: SuspiciousSet
    ranking: SuspiciousnessRanking


def detect_full(
    graph: BipartiteGraph,
    mode: Mode | str = Mode.AOBG,
    c: float = DEFAULT_C,
    thickness: float | None = None,
    depth: int | None = None,
    order: OrderSpec = "g",
) -> Detection:
    baskets, _ = build_baskets(graph, mode, c, order)
    tree = build_stree(baskets, graph.source_labels, graph.target_labels)
    params = BoundaryParams(
        default_thickness(tree) if thickness is None else thickness,
        default_depth(baskets, tree) if depth is None else depth,
    )
    selected = select_suspicious(tree, params)
    return Detection(baskets, tree, params, selected, s_scores(selected, graph.source_labels))


def detect(
    graph: BipartiteGraph,
    mode: Mode | str = Mode.AOBG,
    c: float = DEFAULT_C,
    thickness: float | None = None,
    depth: int | None = None,
) -> SuspiciousnessRanking:
    """Baskets, tree, boundary (averages unless overridden), selection, ranking."""
    return detect_full(graph, mode, c, thickness, depth).ranking
