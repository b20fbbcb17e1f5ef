"""Maximal half-isolated biclique (MHI) enumeration on a pair of S-trees.

A biclique ``[S, M]`` is half isolated when either every source in ``S``
has no neighbor outside ``M``, or every target in ``M`` has no neighbor
outside ``S``. The solver walks the target-side tree ``T`` and the
source-side tree ``T1`` once each, then prunes contained candidates.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import combinations

from .basket import DEFAULT_C, Mode, OrderSpec, build_baskets
from .graph import BipartiteGraph, transpose
from .stree import ROOT, NodeClass, STree, build_stree, classify_node

__all__ = [
    "Biclique",
    "BicliqueSet",
    "OracleSizeError",
    "brute_force_mhi",
    "find_mhi_candidates",
    "is_half_isolated",
    "merge",
    "solve_mhibp",
]

ORACLE_MAX_SIDE = 14


class OracleSizeError(ValueError):
    """Raised when the brute-force oracle is asked for too large a graph."""


@dataclass(frozen=True)
class Biclique:
    sources: frozenset[int]
    targets: frozenset[int]

    def __post_init__(self) -> None:
        if not self.sources or not self.targets:
            raise ValueError("a biclique needs non-empty source and target sets")

    def __le__(self, other: Biclique) -> bool:
        return self.sources <= other.sources and self.targets <= other.targets

    def __lt__(self, other: Biclique) -> bool:
        return self <= other and self != other

    def swapped(self) -> Biclique:
        return Biclique(self.targets, self.sources)

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(sorted(self.sources)), tuple(sorted(self.targets))

    def is_biclique_of(self, g: BipartiteGraph) -> bool:
        return all(g.has_edge(n, m) for n in self.sources for m in self.targets)


class BicliqueSet:
    """Canonically ordered, duplicate-free collection of bicliques."""

    __slots__ = ("_items",)

    def __init__(self, items: Iterable[Biclique] = ()) -> None:
        self._items = tuple(sorted(set(items), key=Biclique.key))

    def __iter__(self) -> Iterator[Biclique]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, item: object) -> bool:
        return item in self._items

    def __eq__(self, other: object) -> bool:
        if isinstance(other, BicliqueSet):
            return self._items == other._items
        if isinstance(other, (set, frozenset)):
            return set(self._items) == other
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join(f"({sorted(b.sources)}, {sorted(b.targets)})" for b in self._items)
        return f"BicliqueSet([{body}])"

    def is_antichain(self) -> bool:
        return not any(a <= b or b <= a for a, b in combinations(self._items, 2))

    def to_jsonl(self, g: BipartiteGraph) -> str:
        lines = []
        for b in self._items:
            s, t = b.key()
            rec = {
                "sources": [g.source_labels[i] for i in s],
                "targets": [g.target_labels[i] for i in t],
            }
            lines.append(json.dumps(rec, ensure_ascii=False))
        return "".join(line + "\n" for line in lines)


def _represented(tree: STree, x: int, path_set: frozenset[int]) -> Biclique | None:
    """Biclique (tree frame) represented at a leaf/branch/narrow node, if any."""
    # tn(x) minus the union of the children's tn is exactly the set of
    # baskets that end at x
    residual = tree.ending_targets(x)
    if not residual:
        return None
    return Biclique(path_set, frozenset(residual))


def find_mhi_candidates(tree: STree) -> BicliqueSet:
    """Depth-first scan emitting one candidate per maximal-shared path.

    Candidates are in the tree's own frame: ``sources`` are the ``sn``
    labels along the path and ``targets`` the residual ``tn``.
    """
    out: list[Biclique] = []
    path: list[int] = []
    stack = [c for c in reversed(tree.child_indices(ROOT).tolist())]
    node = tree.node
    while stack:
        x = stack.pop()
        d = int(tree.depth[x])
        del path[d - 1 :]
        path.append(int(tree.sn[x]))
        kind = classify_node(node(x))
        if kind is not NodeClass.PASS_THROUGH:
            found = _represented(tree, x, frozenset(path))
            if found is not None:
                out.append(found)
        stack.extend(reversed(tree.child_indices(x).tolist()))
    return BicliqueSet(out)


def _tree_pair(
    g: BipartiteGraph, mode: Mode | str, c: float, order: OrderSpec
) -> tuple[STree, STree]:
    t_baskets, _ = build_baskets(g, mode, c, order)
    tree = build_stree(t_baskets, g.source_labels, g.target_labels)
    gt = transpose(g)
    s_baskets, _ = build_baskets(gt, mode, c, order)
    tree1 = build_stree(s_baskets, gt.source_labels, gt.target_labels)
    return tree, tree1


def _pruned(
    cands: BicliqueSet, other: STree, *, strict: bool
) -> list[Biclique]:
    """Drop candidates (other-tree frame swapped) contained in a biclique
    represented along the path of one of their members' baskets in ``other``.

    ``cands`` are in the frame where ``targets`` are the node type whose
    baskets make up ``other``.
    """
    kept = []
    for cand in cands:
        n = min(cand.targets)
        # baskets are laid out by ascending id, so position == id
        end = int(other.basket_end[n])
        path = other.path_indices(end)
        depth_of = {int(other.sn[y]): i + 1 for i, y in enumerate(path)}
        need = max((depth_of.get(s, 1 << 62) for s in cand.sources), default=0)
        contained = False
        for y in path:
            if other.depth[y] < need:
                continue
            kind = classify_node(other.node(y))
            if kind is NodeClass.PASS_THROUGH:
                continue
            residual = other.ending_targets(y)
            if not residual or not cand.targets <= frozenset(residual):
                continue
            if strict:
                prefix = frozenset(int(other.sn[z]) for z in path[: int(other.depth[y])])
                if prefix == cand.sources and frozenset(residual) == cand.targets:
                    continue
            contained = True
            break
        if not contained:
            kept.append(cand)
    return kept


def merge(cands_s: BicliqueSet, cands_t: BicliqueSet, tree: STree, tree1: STree) -> BicliqueSet:
    """Combine candidates from both trees, dropping repeated and contained ones.

    ``cands_s`` come from ``tree`` (built over target baskets) and
    ``cands_t`` from ``tree1`` (over source baskets), both already in the
    original source/target frame. Each candidate is compared only against
    bicliques represented on the path of one member's basket in the
    opposite tree. An exact duplicate survives once, from ``cands_t``.
    """
    # tree1's baskets are keyed by original sources; view cands_s in that frame
    kept_s = _pruned(BicliqueSet(b.swapped() for b in cands_s), tree1, strict=False)
    kept_t = _pruned(cands_t, tree, strict=True)
    return BicliqueSet([b.swapped() for b in kept_s] + kept_t)


def solve_mhibp(
    g: BipartiteGraph,
    mode: Mode | str = Mode.AOBG,
    c: float = DEFAULT_C,
    order: OrderSpec = "g",
) -> BicliqueSet:
    """All maximal half-isolated bicliques of ``g``."""
    tree, tree1 = _tree_pair(g, mode, c, order)
    cands_s = find_mhi_candidates(tree)
    cands_t = BicliqueSet(b.swapped() for b in find_mhi_candidates(tree1))
    return merge(cands_s, cands_t, tree, tree1)


def is_half_isolated(b: Biclique, g: BipartiteGraph) -> bool:
    """Direct edge check of the half-isolated biclique condition."""
    if not b.is_biclique_of(g):
        return False
    sources_closed = all(set(g.source_neighbors(n).tolist()) <= b.targets for n in b.sources)
    targets_closed = all(set(g.target_neighbors(m).tolist()) <= b.sources for m in b.targets)
    return sources_closed or targets_closed


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def brute_force_mhi(g: BipartiteGraph, max_side: int = ORACLE_MAX_SIDE) -> BicliqueSet:
    """Exhaustive MHI enumeration straight from the definitions.

    Every non-empty source subset is paired with every non-empty subset of
    its common neighborhood; pairs failing the half-isolation test are
    dropped, then any biclique contained in another is discarded.
    """
    if g.n_sources > max_side or g.n_targets > max_side:
        raise OracleSizeError(
            f"oracle limited to {max_side} nodes per side, got {g.n_sources}x{g.n_targets}"
        )
    out_mask = [0] * g.n_sources
    in_mask = [0] * g.n_targets
    for s, t in zip(g.edge_src.tolist(), g.edge_tgt.tolist()):
        out_mask[s] |= 1 << t
        in_mask[t] |= 1 << s
    full_t = (1 << g.n_targets) - 1

    hi: list[tuple[int, int]] = []
    for smask in range(1, 1 << g.n_sources):
        common = full_t
        union = 0
        for n in range(g.n_sources):
            if smask >> n & 1:
                common &= out_mask[n]
                union |= out_mask[n]
        for tmask in _submasks(common):
            if union & ~tmask == 0:
                hi.append((smask, tmask))
                continue
            t_union = 0
            for m in range(g.n_targets):
                if tmask >> m & 1:
                    t_union |= in_mask[m]
            if t_union & ~smask == 0:
                hi.append((smask, tmask))

    maximal = []
    for a_s, a_t in hi:
        dominated = any(
            (a_s & b_s) == a_s and (a_t & b_t) == a_t and (a_s, a_t) != (b_s, b_t)
            for b_s, b_t in hi
        )
        if not dominated:
            maximal.append(
                Biclique(
                    frozenset(i for i in range(g.n_sources) if a_s >> i & 1),
                    frozenset(i for i in range(g.n_targets) if a_t >> i & 1),
                )
            )
    return BicliqueSet(maximal)
