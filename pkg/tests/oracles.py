"""Slow, literal reference implementations used as test oracles.

Nothing here shares code with the package beyond the graph type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations


def edges_of(records):
    return {(s, t) for s, t in records}


def naive_f(n_edges: int, deg: int, mode: str, c: float = 1.0) -> float:
    if mode == "aobg":
        return math.log(n_edges / (deg + c))
    return math.log(deg + c)


def naive_baskets(edges: set[tuple[int, int]], n_targets: int, mode: str, c: float = 1.0):
    """[(m, ordered sources, f)] straight from the definitions."""
    inn: dict[int, list[int]] = {m: [] for m in range(n_targets)}
    for s, t in edges:
        inn[t].append(s)
    f = {m: naive_f(len(edges), len(inn[m]), mode, c) for m in inn}
    g: dict[int, float] = {}
    for s, t in sorted(edges):
        g[s] = g.get(s, 0.0) + f[t]
    out = []
    for m in range(n_targets):
        ordered = sorted(inn[m], key=lambda n: (-g[n], n))
        out.append((m, ordered, f[m]))
    return out, g


@dataclass
class NaiveNode:
    sn: int
    sus: float
    tn: set[int]
    depth: int
    children: dict[int, "NaiveNode"] = field(default_factory=dict)


def naive_tree(baskets) -> NaiveNode:
    """Basket-by-basket insertion with explicit tn sets."""
    root = NaiveNode(-1, 0.0, set(), 0)
    for m, ordered, f in baskets:
        x = root
        for n in ordered:
            y = x.children.get(n)
            if y is None:
                y = NaiveNode(n, f, {m}, x.depth + 1)
                x.children[n] = y
            else:
                y.sus += f
                y.tn.add(m)
            x = y
    return root


def naive_walk(root: NaiveNode):
    """(path sources tuple, node) for every non-root node, pre-order."""
    out = []
    stack = [(c, (c.sn,)) for c in reversed(list(root.children.values()))]
    while stack:
        x, path = stack.pop()
        out.append((path, x))
        stack.extend((c, path + (c.sn,)) for c in reversed(list(x.children.values())))
    return out


def pair_auc(scores, labels) -> float:
    """Mann-Whitney by explicit pair enumeration."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = 0.0
    for p in pos:
        for n in neg:
            wins += 1.0 if p > n else 0.5 if p == n else 0.0
    return wins / (len(pos) * len(neg))


def sweep_best_f1(scores, labels) -> float:
    best = 0.0
    n_pos = sum(labels)
    for th in set(scores):
        tp = sum(1 for s, y in zip(scores, labels) if s >= th and y == 1)
        pred = sum(1 for s in scores if s >= th)
        if tp:
            p, r = tp / pred, tp / n_pos
            best = max(best, 2 * p * r / (p + r))
    return best


def naive_mhi(edges: set[tuple[int, int]], sources, targets):
    """Maximal half-isolated bicliques by subset enumeration (tiny graphs)."""
    out_n = {s: {t for a, t in edges if a == s} for s in sources}
    in_m = {t: {s for s, b in edges if b == t} for t in targets}
    hi = []
    for k in range(1, len(sources) + 1):
        for S in combinations(sorted(sources), k):
            common = set.intersection(*(out_n[s] for s in S))
            for j in range(1, len(common) + 1):
                for M in combinations(sorted(common), j):
                    s_set, m_set = set(S), set(M)
                    closed_s = all(out_n[s] <= m_set for s in S)
                    closed_m = all(in_m[t] <= s_set for t in M)
                    if closed_s or closed_m:
                        hi.append((frozenset(S), frozenset(M)))
    return {
        a for a in hi
        if not any(a != b and a[0] <= b[0] and a[1] <= b[1] for b in hi)
    }
