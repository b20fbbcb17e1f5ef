"""Seeded synthetic graphs: random backgrounds, injected fraud groups,
camouflage edges and 1+K registration-style datasets."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .basket import Mode
from .graph import BipartiteGraph
from .sforest import KDataset

__all__ = [
    "CamKind",
    "InjectionSpec",
    "LabeledGraph",
    "SpecError",
    "add_camouflage",
    "gen_background",
    "gen_kdataset",
    "gen_overlap_kdataset",
    "inject_group",
    "make_instance",
]


class SpecError(ValueError):
    """Raised for an invalid injection or camouflage request."""


class CamKind(enum.Enum):
    NONE = "none"
    ACAM = "acam"
    PCAM = "pcam"


@dataclass(frozen=True)
class InjectionSpec:
    n_fraud_sources: int
    lam: int
    rho: float
    theta: int = 0
    cam_kind: CamKind = CamKind.NONE
    seed: int = 0
    # "fixed": every source gets round(rho*lam) targets; "binomial": Binomial(lam, rho)
    sampling: str = "fixed"

    def __post_init__(self) -> None:
        if self.n_fraud_sources < 1 or self.lam < 1:
            raise SpecError("need at least one fraud source and one fraud target")
        if not 0.0 < self.rho <= 1.0:
            raise SpecError(f"rho must lie in (0, 1], got {self.rho}")
        if self.rho * self.lam < 1:
            raise SpecError("rho * lam must be at least 1")
        if self.theta < 0:
            raise SpecError("theta must be non-negative")
        if self.sampling not in ("fixed", "binomial"):
            raise SpecError(f"unknown sampling {self.sampling!r}")

    @property
    def per_source(self) -> int:
        return int(math.floor(self.rho * self.lam + 0.5))


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    graph: BipartiteGraph
    fraud_sources: frozenset[int] = field(default_factory=frozenset)
    fraud_targets: frozenset[int] = field(default_factory=frozenset)

    def source_labels01(self) -> np.ndarray:
        y = np.zeros(self.graph.n_sources, dtype=np.int64)
        y[list(self.fraud_sources)] = 1
        return y


def gen_background(n_sources: int, n_targets: int, edge_prob: float, seed: int) -> BipartiteGraph:
    """Erdős–Rényi bipartite graph: each pair present independently.

    The edge count is drawn from the binomial law and that many distinct
    cells are sampled uniformly, which is the same distribution without
    materialising the ``n_sources x n_targets`` matrix.
    """
    if not 0.0 <= edge_prob <= 1.0:
        raise SpecError(f"edge_prob must lie in [0, 1], got {edge_prob}")
    rng = np.random.default_rng(seed)
    cells = n_sources * n_targets
    k = int(rng.binomial(cells, edge_prob)) if cells else 0
    picked = rng.choice(cells, size=k, replace=False) if k else np.empty(0, dtype=np.int64)
    src, tgt = np.divmod(picked.astype(np.int64), max(n_targets, 1))
    return BipartiteGraph.from_arrays(n_sources, n_targets, src, tgt)


def _as_labeled(g: Union[BipartiteGraph, LabeledGraph]) -> LabeledGraph:
    return g if isinstance(g, LabeledGraph) else LabeledGraph(g)


def inject_group(
    g: Union[BipartiteGraph, LabeledGraph], spec: InjectionSpec, prefix: str = "fraud"
) -> LabeledGraph:
    """Add an isolated rho-synchronised group on fresh nodes.

    Each of the ``n_fraud_sources`` new sources links to a uniform subset of
    the ``lam`` new targets. Fraud nodes get no other edges. Camouflage in
    ``spec`` is not applied here; see :func:`add_camouflage`.
    """
    lg = _as_labeled(g)
    base = lg.graph
    rng = np.random.default_rng(spec.seed)
    k = spec.per_source
    if k == 0 and spec.sampling == "fixed":
        raise SpecError("round(rho * lam) is zero")
    s0, t0 = base.n_sources, base.n_targets
    src_parts, tgt_parts = [], []
    for i in range(spec.n_fraud_sources):
        size = k if spec.sampling == "fixed" else int(rng.binomial(spec.lam, spec.rho))
        w = rng.choice(spec.lam, size=size, replace=False)
        src_parts.append(np.full(size, s0 + i, dtype=np.int64))
        tgt_parts.append(t0 + w.astype(np.int64))
    tag = f"{prefix}{len(lg.fraud_sources)}_" if lg.fraud_sources else prefix
    src_labels = list(base.source_labels) + [f"{tag}s{i}" for i in range(spec.n_fraud_sources)]
    tgt_labels = list(base.target_labels) + [f"{tag}t{j}" for j in range(spec.lam)]
    graph = BipartiteGraph.from_arrays(
        len(src_labels),
        len(tgt_labels),
        np.concatenate([base.edge_src, *src_parts]),
        np.concatenate([base.edge_tgt, *tgt_parts]),
        src_labels,
        tgt_labels,
    )
    return LabeledGraph(
        graph,
        lg.fraud_sources | frozenset(range(s0, s0 + spec.n_fraud_sources)),
        lg.fraud_targets | frozenset(range(t0, t0 + spec.lam)),
    )


def add_camouflage(
    lg: LabeledGraph,
    cam_kind: Union[CamKind, str],
    theta: int,
    seed: int,
    group_sources: frozenset[int] | None = None,
    group_targets: frozenset[int] | None = None,
) -> LabeledGraph:
    """Add camouflage edges around the fraud nodes.

    ``ACAM``: every fraud source gains ``theta`` edges to distinct, uniformly
    drawn non-fraud targets. ``PCAM``: every fraud target gains ``theta``
    edges from distinct non-fraud sources. ``group_*`` restrict which fraud
    nodes are camouflaged (default: all of them).
    """
    kind = CamKind(cam_kind) if isinstance(cam_kind, str) else cam_kind
    if theta < 0:
        raise SpecError("theta must be non-negative")
    if kind is CamKind.NONE or theta == 0:
        return lg
    g = lg.graph
    rng = np.random.default_rng(seed)
    if kind is CamKind.ACAM:
        actors = sorted(lg.fraud_sources if group_sources is None else group_sources)
        pool = np.setdiff1d(np.arange(g.n_targets), np.fromiter(lg.fraud_targets, dtype=np.int64))
    else:
        actors = sorted(lg.fraud_targets if group_targets is None else group_targets)
        pool = np.setdiff1d(np.arange(g.n_sources), np.fromiter(lg.fraud_sources, dtype=np.int64))
    if theta > pool.size:
        raise SpecError(f"theta={theta} exceeds the {pool.size} available non-fraud nodes")
    picks = [rng.choice(pool, size=theta, replace=False) for _ in actors]
    fixed = np.repeat(np.asarray(actors, dtype=np.int64), theta)
    drawn = np.concatenate(picks).astype(np.int64) if picks else np.empty(0, dtype=np.int64)
    src, tgt = (fixed, drawn) if kind is CamKind.ACAM else (drawn, fixed)
    graph = BipartiteGraph.from_arrays(
        g.n_sources,
        g.n_targets,
        np.concatenate([g.edge_src, src]),
        np.concatenate([g.edge_tgt, tgt]),
        g.source_labels,
        g.target_labels,
    )
    return LabeledGraph(graph, lg.fraud_sources, lg.fraud_targets)


def make_instance(
    background: BipartiteGraph, spec: InjectionSpec
) -> LabeledGraph:
    """Inject one group and apply the spec's camouflage (seeded from ``spec.seed``)."""
    lg = inject_group(background, spec)
    return add_camouflage(lg, spec.cam_kind, spec.theta, seed=spec.seed + 1_000_003)


def _group_sizes(rng: np.random.Generator, total: int, low: int, high: int) -> list[int]:
    sizes = []
    left = total
    while left > 0:
        s = int(rng.integers(low, high + 1))
        if left - s < low:
            s = left
        sizes.append(s)
        left -= s
    return sizes


def gen_kdataset(
    n_accounts: int,
    fraud_fraction: float,
    critical_dims: int,
    noise_dims: int,
    seed: int,
    group_size: tuple[int, int] = (10, 200),
    values_per_group: tuple[int, int] = (1, 3),
    legit_pool_factor: float = 2.0,
    noise_cardinality: tuple[int, int] = (2, 8),
) -> tuple[KDataset, dict[str, int]]:
    """Registration-style 1+K data: one row per account.

    Critical dimensions: fraud accounts come in groups, and each group draws
    its values from a handful of group-private values (resource sharing);
    legit accounts draw uniformly from a pool ``legit_pool_factor`` times
    the number of accounts, so their values are rarely shared. Noise
    dimensions have a few values with skewed frequencies that both
    populations draw from identically.
    """
    if critical_dims + noise_dims < 1:
        raise SpecError("need at least one dimension")
    if not 0.0 <= fraud_fraction <= 1.0:
        raise SpecError("fraud_fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    n_fraud = int(round(n_accounts * fraud_fraction))
    is_fraud = np.zeros(n_accounts, dtype=bool)
    is_fraud[rng.choice(n_accounts, size=n_fraud, replace=False)] = True
    fraud_ids = np.nonzero(is_fraud)[0]
    rng.shuffle(fraud_ids)
    sizes = _group_sizes(rng, n_fraud, *group_size) if n_fraud else []
    group_of = np.full(n_accounts, -1, dtype=np.int64)
    start = 0
    for gi, s in enumerate(sizes):
        group_of[fraud_ids[start : start + s]] = gi
        start += s

    columns: list[list[str]] = []
    dims: list[tuple[str, Mode]] = []
    legit_pool = max(1, int(legit_pool_factor * n_accounts))
    for k in range(critical_dims):
        col = rng.integers(0, legit_pool, size=n_accounts).astype(str)
        values = np.char.add(f"c{k}_", col).astype(object)
        for gi in range(len(sizes)):
            members = np.nonzero(group_of == gi)[0]
            n_vals = int(rng.integers(values_per_group[0], values_per_group[1] + 1))
            values[members] = [f"c{k}_g{gi}_{v}" for v in rng.integers(0, n_vals, size=members.size)]
        columns.append(values.tolist())
        dims.append((f"critical{k}", Mode.ARBG))
    for k in range(noise_dims):
        card = int(rng.integers(noise_cardinality[0], noise_cardinality[1] + 1))
        probs = rng.dirichlet(np.ones(card))
        col = rng.choice(card, size=n_accounts, p=probs)
        columns.append([f"n{k}_{v}" for v in col.tolist()])
        dims.append((f"noise{k}", Mode.ARBG))

    ids = [f"acct{i}" for i in range(n_accounts)]
    rows = [(ids[i], tuple(col[i] for col in columns)) for i in range(n_accounts)]
    labels = {ids[i]: int(is_fraud[i]) for i in range(n_accounts)}
    return KDataset("account", dims, rows), labels


def gen_overlap_kdataset(
    n_legit: int,
    group_size: int,
    overlap: float,
    lam: int,
    seed: int,
    legit_rows: int = 3,
    pool_size: int | None = None,
    mode: Mode = Mode.ARBG,
) -> tuple[KDataset, dict[str, int], frozenset[str], frozenset[str]]:
    """Two-dimension data with fraud groups ``A`` (dense on dim 1) and ``B``
    (dense on dim 2) sharing ``overlap * group_size`` accounts.

    A group member writes one row per group value (``lam`` values, all of
    them), so its group forms a biclique on its dense dimension; the other
    dimension of those rows is drawn from the legit pool. Accounts in both
    groups take dim-1 values from ``A`` and dim-2 values from ``B``.
    Returns ``(data, labels, A, B)`` with ``A``/``B`` as account ids.
    """
    rng = np.random.default_rng(seed)
    pool = pool_size if pool_size is not None else max(lam + 1, 2 * n_legit)
    n_shared = int(round(overlap * group_size))
    a_ids = [f"a{i}" for i in range(group_size - n_shared)]
    b_ids = [f"b{i}" for i in range(group_size - n_shared)]
    w_ids = [f"w{i}" for i in range(n_shared)]
    legit_ids = [f"u{i}" for i in range(n_legit)]
    rows: list[tuple[str, tuple[str, str]]] = []

    def legit_value(k: int) -> str:
        return f"d{k}_{int(rng.integers(0, pool))}"

    for u in legit_ids:
        for _ in range(legit_rows):
            rows.append((u, (legit_value(1), legit_value(2))))
    for a in a_ids:
        for j in range(lam):
            rows.append((a, (f"A_{j}", legit_value(2))))
    for b in b_ids:
        for j in range(lam):
            rows.append((b, (legit_value(1), f"B_{j}")))
    for w in w_ids:
        for j in range(lam):
            rows.append((w, (f"A_{j}", f"B_{j}")))
    order = rng.permutation(len(rows))
    rows = [rows[i] for i in order.tolist()]
    labels = {u: 0 for u in legit_ids}
    labels.update({x: 1 for x in a_ids + b_ids + w_ids})
    data = KDataset("account", [("dim1", mode), ("dim2", mode)], rows)
    return data, labels, frozenset(a_ids + w_ids), frozenset(b_ids + w_ids)
