"""S-forest: one S-tree per attribute of a 1+K dataset, scores combined
as ``S(n) = sum_k w_k * s_k(n)`` with ``w_k = ln q_k``."""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .basket import DEFAULT_C, Basket, Mode, build_baskets
from .detector import (
    BoundaryParams,
    SuspiciousnessRanking,
    default_depth,
    default_thickness,
    s_scores,
    select_suspicious,
)
from .graph import BipartiteGraph, IngestError
from .stree import STree, build_stree

__all__ = [
    "KDataset",
    "SForest",
    "TreeParams",
    "build_forest",
    "dimension_scores",
    "forest_scores",
    "read_kdataset",
]


@dataclass(frozen=True)
class KDataset:
    """Rows of ``(id, (a_1, ..., a_K))`` plus a name and mode per attribute."""

    id_field_name: str
    dims: Sequence[tuple[str, Mode]]
    rows: Sequence[tuple[str, Sequence[str]]]

    def __post_init__(self) -> None:
        if len(self.dims) < 1:
            raise IngestError("a 1+K dataset needs K >= 1 attribute columns")
        k = len(self.dims)
        for lineno, (ident, values) in enumerate(self.rows, start=1):
            if not ident:
                raise IngestError(f"row {lineno}: empty id")
            if len(values) != k:
                raise IngestError(f"row {lineno}: expected {k} attribute values, got {len(values)}")
            for (name, _), v in zip(self.dims, values):
                if v is None or v == "":
                    raise IngestError(f"row {lineno}: missing value for {name!r}")

    @property
    def k(self) -> int:
        return len(self.dims)

    def drop_dims(self, names: Sequence[str]) -> KDataset:
        keep = [i for i, (n, _) in enumerate(self.dims) if n not in set(names)]
        return KDataset(
            self.id_field_name,
            [self.dims[i] for i in keep],
            [(ident, tuple(vals[i] for i in keep)) for ident, vals in self.rows],
        )

    def with_dim(self, name: str, mode: Mode, values: Sequence[str]) -> KDataset:
        if len(values) != len(self.rows):
            raise IngestError("one value per row required")
        return KDataset(
            self.id_field_name,
            [*self.dims, (name, mode)],
            [(ident, (*vals, v)) for (ident, vals), v in zip(self.rows, values)],
        )


@dataclass(frozen=True, eq=False)
class SForest:
    dims: Sequence[tuple[str, Mode]]
    graphs: list[BipartiteGraph]
    baskets: list[list[Basket]]
    trees: list[STree]
    weights: list[float]

    @property
    def source_labels(self) -> tuple[str, ...]:
        return self.graphs[0].source_labels


# per-dimension boundary overrides; None fields fall back to that tree's averages
@dataclass(frozen=True)
class TreeParams:
    thickness: Optional[float] = None
    depth: Optional[int] = None


def build_forest(data: KDataset, c: float = DEFAULT_C) -> SForest:
    """One bipartite graph ``id x A_k`` and one S-tree per attribute.

    All graphs share the same source ids (first-appearance order of ids).
    """
    if not data.rows:
        raise IngestError("dataset has no rows")
    id_index: dict[str, int] = {}
    src = np.fromiter(
        (id_index.setdefault(ident, len(id_index)) for ident, _ in data.rows),
        dtype=np.int64,
        count=len(data.rows),
    )
    ids = list(id_index)
    graphs, baskets, trees, weights = [], [], [], []
    for k, (_, mode) in enumerate(data.dims):
        val_index: dict[str, int] = {}
        tgt = np.fromiter(
            (val_index.setdefault(vals[k], len(val_index)) for _, vals in data.rows),
            dtype=np.int64,
            count=len(data.rows),
        )
        g = BipartiteGraph.from_arrays(len(ids), len(val_index), src, tgt, ids, list(val_index))
        b, _ = build_baskets(g, mode, c)
        graphs.append(g)
        baskets.append(b)
        trees.append(build_stree(b, g.source_labels, g.target_labels))
        weights.append(math.log(len(val_index)))
    return SForest(list(data.dims), graphs, baskets, trees, weights)


def dimension_scores(
    forest: SForest, params: Optional[Sequence[Optional[TreeParams]]] = None
) -> list[np.ndarray]:
    """Unweighted per-tree s-scores, indexed by source id."""
    if params is not None and len(params) != len(forest.trees):
        raise ValueError("one TreeParams (or None) per dimension required")
    out = []
    for k, (tree, baskets) in enumerate(zip(forest.trees, forest.baskets)):
        p = params[k] if params is not None and params[k] is not None else TreeParams()
        bp = BoundaryParams(
            default_thickness(tree) if p.thickness is None else p.thickness,
            default_depth(baskets, tree) if p.depth is None else p.depth,
        )
        ranking = s_scores(select_suspicious(tree, bp), forest.source_labels)
        out.append(ranking.scores)
    return out


def forest_scores(
    forest: SForest, params: Optional[Sequence[Optional[TreeParams]]] = None
) -> SuspiciousnessRanking:
    """Weighted sum of per-tree s-scores."""
    total = np.zeros(len(forest.source_labels), dtype=np.float64)
    for w, s in zip(forest.weights, dimension_scores(forest, params)):
        if w != 0.0:
            total += w * s
    return SuspiciousnessRanking.from_scores(forest.source_labels, total)


def read_kdataset(csv_path: str | Path, modes: Mapping[str, str] | str | Path) -> KDataset:
    """Read a 1+K CSV (header row; first column is the id).

    ``modes`` maps every attribute column to ``"aobg"`` or ``"arbg"``; it may
    be given as a mapping or as the path of a JSON sidecar holding one.
    """
    if not isinstance(modes, Mapping):
        with open(modes, encoding="utf-8") as fh:
            modes = json.load(fh)
        if not isinstance(modes, Mapping):
            raise IngestError("mode sidecar must be a JSON object of column -> mode")
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{csv_path}: empty file") from None
        if len(header) < 2:
            raise IngestError(f"{csv_path}: need an id column and at least one attribute")
        dims = []
        for name in header[1:]:
            if name not in modes:
                raise IngestError(f"no mode configured for column {name!r}")
            dims.append((name, Mode.parse(modes[name])))
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise IngestError(f"{csv_path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            rows.append((rec[0], tuple(rec[1:])))
    return KDataset(header[0], dims, rows)
