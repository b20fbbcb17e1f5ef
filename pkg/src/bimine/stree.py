"""Suspiciousness tree (S-tree): a prefix tree over ordered baskets.

Nodes live in flat arrays indexed by creation order; index 0 is the
synthetic root. A node's ``tn`` set is not copied into every node: each
basket records the node where its insertion ended, and ``tn(x)`` is the
set of baskets ending inside the subtree of ``x``. That is exactly the set
of baskets whose insertion traversed ``x``, kept in ``O(|B|)`` space.
"""

from __future__ import annotations

import enum
from array import array
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import chain
from functools import cached_property
from typing import Optional

import numpy as np

from .basket import Basket, ConsistencyError

__all__ = [
    "NodeClass",
    "STree",
    "STreeNode",
    "build_stree",
    "classify_node",
    "path_of",
]

ROOT = 0


class NodeClass(enum.Enum):
    LEAF = "leaf"
    BRANCH = "branch"
    NARROW = "narrow"
    PASS_THROUGH = "pass-through"


class STree:
    """S-tree built by :func:`build_stree`.

    Array attributes (length ``node_count + 1``, root at index 0):
    ``sn``, ``parent``, ``depth``, ``sus`` and ``count`` (``|tn|``).
    """

    def __init__(
        self,
        baskets: Sequence[Basket],
        sn: np.ndarray,
        parent: np.ndarray,
        depth: np.ndarray,
        sus: np.ndarray,
        count: np.ndarray,
        basket_end: np.ndarray,
        sn_labels: Sequence[str] | None = None,
        tn_labels: Sequence[str] | None = None,
    ) -> None:
        self.baskets = baskets
        self.sn = sn
        self.parent = parent
        self.depth = depth
        self.sus = sus
        self.count = count
        # basket_end[i] is the node where baskets[i] stopped (ROOT if empty)
        self.basket_end = basket_end
        self.sn_labels = sn_labels
        self.tn_labels = tn_labels

        n = sn.size
        kids = np.argsort(parent[1:], kind="stable") + 1
        self._child_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(parent[1:], minlength=n), out=self._child_indptr[1:])
        self._child_index = kids
        ends = np.argsort(basket_end, kind="stable")
        self._end_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(basket_end, minlength=n), out=self._end_indptr[1:])
        self._end_baskets = ends

    # -- sizes -------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return int(self.sn.size) - 1

    @property
    def height(self) -> int:
        return int(self.depth.max()) if self.sn.size else 0

    @property
    def root(self) -> STreeNode:
        return STreeNode(self, ROOT)

    def node(self, index: int) -> STreeNode:
        return STreeNode(self, index)

    def nodes(self) -> list[STreeNode]:
        """All non-root nodes in pre-order."""
        return [STreeNode(self, i) for i in self.preorder[1:].tolist()]

    # -- structure -----------------------------------------------------------

    def child_indices(self, x: int) -> np.ndarray:
        return self._child_index[self._child_indptr[x] : self._child_indptr[x + 1]]

    def n_children(self) -> np.ndarray:
        return np.diff(self._child_indptr)

    def ending_baskets(self, x: int) -> np.ndarray:
        """Positions (in ``baskets``) of baskets whose last source sits at ``x``."""
        return self._end_baskets[self._end_indptr[x] : self._end_indptr[x + 1]]

    def ending_targets(self, x: int) -> list[int]:
        return [self.baskets[i].m for i in self.ending_baskets(x).tolist()]

    @cached_property
    def preorder(self) -> np.ndarray:
        """Node indices in pre-order, children in insertion order."""
        out = np.empty(self.sn.size, dtype=np.int64)
        indptr, index = self._child_indptr.tolist(), self._child_index.tolist()
        stack = [ROOT]
        k = 0
        while stack:
            x = stack.pop()
            out[k] = x
            k += 1
            stack.extend(reversed(index[indptr[x] : indptr[x + 1]]))
        return out

    @cached_property
    def _subtree_span(self) -> tuple[np.ndarray, np.ndarray]:
        pos = np.empty(self.sn.size, dtype=np.int64)
        pos[self.preorder] = np.arange(self.sn.size)
        size = np.ones(self.sn.size, dtype=np.int64)
        for level in self.levels[:0:-1]:
            np.add.at(size, self.parent[level], size[level])
        return pos, size

    @cached_property
    def levels(self) -> list[np.ndarray]:
        """``levels[d]`` holds the indices of nodes at depth ``d``."""
        order = np.argsort(self.depth, kind="stable")
        cuts = np.cumsum(np.bincount(self.depth))
        return np.split(order, cuts[:-1])

    def subtree(self, x: int) -> np.ndarray:
        """``x`` and all of its descendants, in pre-order."""
        pos, size = self._subtree_span
        return self.preorder[pos[x] : pos[x] + size[x]]

    def tn(self, x: int) -> frozenset[int]:
        if x == ROOT:
            raise ValueError("the root node carries no tn")
        nodes = self.subtree(x)
        return frozenset(
            self.baskets[i].m
            for y in nodes.tolist()
            for i in self.ending_baskets(y).tolist()
        )

    def path_indices(self, x: int) -> list[int]:
        out = []
        while x != ROOT:
            out.append(x)
            x = int(self.parent[x])
        out.reverse()
        return out

    # -- checks --------------------------------------------------------------

    def invariant_violations(self, rel_tol: float = 1e-9) -> list[str]:
        """Recompute every node's ``tn`` and ``sus`` by re-walking baskets and
        compare with the stored fields; also check the anti-monotonicity and
        size bounds. Returns human-readable violations (empty when sound).
        """
        problems: list[str] = []
        lengths = np.fromiter((len(b.ordered_sources) for b in self.baskets), dtype=np.int64,
                              count=len(self.baskets))
        mass = int(lengths.sum())
        if self.node_count > mass:
            problems.append(f"node_count {self.node_count} exceeds |E| {mass}")
        max_len = int(lengths.max()) if lengths.size else 0
        if self.height > max_len:
            problems.append(f"height {self.height} exceeds max basket length {max_len}")

        fvals = np.fromiter((b.f for b in self.baskets), dtype=np.float64, count=len(self.baskets))
        flat = np.fromiter(
            (n for b in self.baskets for n in b.ordered_sources), dtype=np.int64, count=mass
        )
        starts = np.concatenate(([0], np.cumsum(lengths)[:-1])) if lengths.size else lengths
        cnt = np.zeros(self.sn.size, dtype=np.int64)
        acc = np.zeros(self.sn.size, dtype=np.float64)
        cur = self.basket_end.copy()
        if not np.array_equal(self.depth[cur], lengths):
            problems.append("basket end depth differs from basket length")
            return problems
        active = np.nonzero(lengths > 0)[0]
        while active.size:
            nodes = cur[active]
            pos = starts[active] + self.depth[nodes] - 1
            bad = self.sn[nodes] != flat[pos]
            if bad.any():
                problems.append(f"{int(bad.sum())} path labels disagree with basket order")
                return problems
            np.add.at(cnt, nodes, 1)
            np.add.at(acc, nodes, fvals[active])
            cur[active] = self.parent[nodes]
            active = active[cur[active] != ROOT]
        if not np.array_equal(cnt[1:], self.count[1:]):
            problems.append("stored |tn| differs from recomputed basket count")
        scale = np.maximum(np.abs(acc[1:]), 1.0)
        if np.any(np.abs(acc[1:] - self.sus[1:]) > rel_tol * scale):
            problems.append("sus differs from the sum of f over tn")
        kids = np.arange(1, self.sn.size)
        par = self.parent[kids]
        inner = par != ROOT
        k, p = kids[inner], par[inner]
        if np.any(self.sus[p] < self.sus[k] - rel_tol * np.maximum(np.abs(self.sus[k]), 1.0)):
            problems.append("anti-monotonicity violated for sus")
        if np.any(self.count[p] < self.count[k]):
            problems.append("anti-monotonicity violated for tn")
        return problems

    def check_invariants(self) -> None:
        problems = self.invariant_violations()
        if problems:
            raise ConsistencyError("; ".join(problems))

    # -- output --------------------------------------------------------------

    def dump(self) -> str:
        """Pre-order rendering, one ``depth, sn-label, sus, |tn|`` line per node."""
        labels = self.sn_labels
        lines = []
        for x in self.preorder[1:].tolist():
            sn = int(self.sn[x])
            lab = labels[sn] if labels is not None else str(sn)
            lines.append(f"{int(self.depth[x])}, {lab}, {float(self.sus[x]):.12g}, {int(self.count[x])}")
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self) -> str:
        return f"STree(node_count={self.node_count}, baskets={len(self.baskets)}, height={self.height})"


@dataclass(frozen=True)
class STreeNode:
    """Read-only view of one tree node."""

    tree: STree
    index: int

    @property
    def is_root(self) -> bool:
        return self.index == ROOT

    @property
    def sn(self) -> int:
        return int(self.tree.sn[self.index])

    @property
    def sus(self) -> float:
        return float(self.tree.sus[self.index])

    @property
    def tn(self) -> frozenset[int]:
        return self.tree.tn(self.index)

    @property
    def tn_size(self) -> int:
        return int(self.tree.count[self.index])

    @property
    def depth(self) -> int:
        return int(self.tree.depth[self.index])

    @property
    def parent(self) -> Optional[STreeNode]:
        if self.is_root:
            return None
        return STreeNode(self.tree, int(self.tree.parent[self.index]))

    @property
    def children(self) -> list[STreeNode]:
        return [STreeNode(self.tree, c) for c in self.tree.child_indices(self.index).tolist()]

    def child(self, sn: int) -> Optional[STreeNode]:
        for c in self.tree.child_indices(self.index).tolist():
            if self.tree.sn[c] == sn:
                return STreeNode(self.tree, c)
        return None

    def descendants(self) -> list[STreeNode]:
        return [STreeNode(self.tree, y) for y in self.tree.subtree(self.index)[1:].tolist()]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, STreeNode):
            return NotImplemented
        return self.tree is other.tree and self.index == other.index

    def __hash__(self) -> int:
        return hash((id(self.tree), self.index))

    def __repr__(self) -> str:
        if self.is_root:
            return "STreeNode(root)"
        return f"STreeNode(sn={self.sn}, sus={self.sus:.6g}, |tn|={self.tn_size}, depth={self.depth})"


def build_stree(
    baskets: Sequence[Basket],
    sn_labels: Sequence[str] | None = None,
    tn_labels: Sequence[str] | None = None,
) -> STree:
    """Insert each basket's ordered sources as a root path.

    A source already present as a child of the current node is shared: its
    ``sus`` grows by ``f(m)`` and ``m`` joins its ``tn``. Otherwise a new
    node starts with ``sus = f(m)`` and ``tn = {m}``.

    The insertions are carried out one depth level at a time over all
    baskets at once. Nodes are then renumbered by (first basket to reach
    them, depth), which is the order basket-at-a-time insertion creates
    them in, and ``sus`` is accumulated in basket order, so the result is
    identical to inserting the baskets one by one.
    """
    nb = len(baskets)
    lengths = np.fromiter((len(b.ordered_sources) for b in baskets), dtype=np.int64, count=nb)
    mass = int(lengths.sum())
    flat = np.fromiter(
        chain.from_iterable(b.ordered_sources for b in baskets), dtype=np.int64, count=mass
    )
    fvals = np.fromiter((b.f for b in baskets), dtype=np.float64, count=nb)
    starts = np.zeros(nb, dtype=np.int64)
    if nb:
        np.cumsum(lengths[:-1], out=starts[1:])
    stride = int(flat.max()) + 1 if mass else 1

    # provisional ids: 0 is the root, new levels are appended in key order
    cur = np.zeros(nb, dtype=np.int64)
    sn_parts, parent_parts, depth_parts, sus_parts, count_parts, first_parts = [], [], [], [], [], []
    active = np.nonzero(lengths > 0)[0]
    size = 1
    d = 0
    while active.size:
        d += 1
        keys = cur[active] * stride + flat[starts[active] + d - 1]
        uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        sn_parts.append(uniq % stride)
        parent_parts.append(uniq // stride)
        depth_parts.append(np.full(uniq.size, d, dtype=np.int64))
        sus_parts.append(np.bincount(inv, weights=fvals[active], minlength=uniq.size))
        count_parts.append(np.bincount(inv, minlength=uniq.size))
        # active is ascending, so the first occurrence is the earliest basket
        first_parts.append(active[first])
        cur[active] = size + inv
        size += uniq.size
        active = active[lengths[active] > d]

    def joined(parts: list[np.ndarray], head: float, dtype: type) -> np.ndarray:
        return np.concatenate([np.array([head], dtype=dtype), *parts]).astype(dtype, copy=False)

    p_sn = joined(sn_parts, -1, np.int64)
    p_parent = joined(parent_parts, -1, np.int64)
    p_depth = joined(depth_parts, 0, np.int64)
    p_sus = joined(sus_parts, 0.0, np.float64)
    p_count = joined(count_parts, 0, np.int64)
    p_first = joined(first_parts, -1, np.int64)

    order = np.lexsort((p_depth, p_first))
    rank = np.empty(size, dtype=np.int64)
    rank[order] = np.arange(size)
    parent = p_parent[order]
    parent[1:] = rank[parent[1:]]
    return STree(
        baskets,
        p_sn[order],
        parent,
        p_depth[order],
        p_sus[order],
        p_count[order],
        rank[cur],
        sn_labels,
        tn_labels,
    )


def _build_stree_incremental(
    baskets: Sequence[Basket],
    sn_labels: Sequence[str] | None = None,
    tn_labels: Sequence[str] | None = None,
) -> STree:
    """Basket-at-a-time insertion; reference for :func:`build_stree`.

    A source already present as a child of the current node is shared: its
    ``sus`` grows by ``f(m)`` and ``m`` joins its ``tn``. Otherwise a new
    node starts with ``sus = f(m)`` and ``tn = {m}``.
    """
    stride = 1 + max((max(b.ordered_sources) for b in baskets if b.ordered_sources), default=0)
    child: dict[int, int] = {}
    sn = array("q", [-1])
    parent = array("q", [-1])
    depth = array("q", [0])
    sus = array("d", [0.0])
    count = array("q", [0])
    ends = array("q", bytes(8 * len(baskets)))
    # hot loop: bound methods hoisted out of the inner iteration
    get = child.get
    sn_add, parent_add, depth_add = sn.append, parent.append, depth.append
    sus_add, count_add = sus.append, count.append
    size = 1
    for i, b in enumerate(baskets):
        fm = b.f
        x = ROOT
        d = 0
        for n in b.ordered_sources:
            d += 1
            key = x * stride + n
            y = get(key)
            if y is None:
                y = size
                size += 1
                child[key] = y
                sn_add(n)
                parent_add(x)
                depth_add(d)
                sus_add(fm)
                count_add(1)
            else:
                sus[y] += fm
                count[y] += 1
            x = y
        ends[i] = x
    return STree(
        baskets,
        np.frombuffer(sn, dtype=np.int64),
        np.frombuffer(parent, dtype=np.int64),
        np.frombuffer(depth, dtype=np.int64),
        np.frombuffer(sus, dtype=np.float64),
        np.frombuffer(count, dtype=np.int64),
        np.frombuffer(ends, dtype=np.int64),
        sn_labels,
        tn_labels,
    )


def classify_node(x: STreeNode) -> NodeClass:
    """Leaf, branch (>= 2 children), narrow, or pass-through.

    A single-child node is narrow when some basket ends at it, i.e. its
    ``tn`` strictly contains the child's.
    """
    if x.is_root:
        raise ValueError("the root node has no class")
    kids = x.tree.child_indices(x.index)
    if kids.size == 0:
        return NodeClass.LEAF
    if kids.size >= 2:
        return NodeClass.BRANCH
    if x.tree.count[x.index] > x.tree.count[kids[0]]:
        return NodeClass.NARROW
    return NodeClass.PASS_THROUGH


def path_of(x: STreeNode) -> list[STreeNode]:
    """Nodes from just below the root down to ``x`` inclusive."""
    return [STreeNode(x.tree, i) for i in x.tree.path_indices(x.index)]
