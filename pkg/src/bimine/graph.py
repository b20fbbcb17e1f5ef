"""Bipartite graph with interned source/target nodes.

Node ids are dense integers assigned per side in first-appearance order.
Edges are stored deduplicated as two parallel ``int64`` arrays, sorted by
(source, target), with CSR adjacency for both sides.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import NamedTuple

import numpy as np

__all__ = [
    "BipartiteGraph",
    "IngestError",
    "NodeId",
    "Side",
    "UnknownNodeError",
    "ingest_edges",
    "neighbors_of_source",
    "neighbors_of_target",
    "read_edge_list",
    "transpose",
    "write_edge_list",
]


class IngestError(ValueError):
    """Raised for malformed edge or dataset input."""


class UnknownNodeError(KeyError):
    """Raised when a node id or label is not interned in the graph."""


class Side(enum.Enum):
    SOURCE = "source"
    TARGET = "target"


class NodeId(NamedTuple):
    id: int
    side: Side


def _csr(keys: np.ndarray, values: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=indptr[1:])
    return indptr, values[order]


class BipartiteGraph:
    """Immutable bipartite graph ``G = (N ∪ M, E)``.

    Build one with :func:`ingest_edges` (string labels) or
    :meth:`from_arrays` (already-interned integer ids).
    """

    __slots__ = (
        "source_labels",
        "target_labels",
        "edge_src",
        "edge_tgt",
        "_src_indptr",
        "_src_nbrs",
        "_tgt_indptr",
        "_tgt_nbrs",
        "_source_index",
        "_target_index",
    )

    def __init__(
        self,
        source_labels: Sequence[str],
        target_labels: Sequence[str],
        edge_src: np.ndarray,
        edge_tgt: np.ndarray,
    ) -> None:
        # callers guarantee dedup + (src, tgt) sort order; use from_arrays otherwise
        self.source_labels = tuple(source_labels)
        self.target_labels = tuple(target_labels)
        self.edge_src = edge_src
        self.edge_tgt = edge_tgt
        self.edge_src.setflags(write=False)
        self.edge_tgt.setflags(write=False)
        n_s, n_t = len(self.source_labels), len(self.target_labels)
        self._src_indptr = np.zeros(n_s + 1, dtype=np.int64)
        np.cumsum(np.bincount(edge_src, minlength=n_s), out=self._src_indptr[1:])
        self._src_nbrs = edge_tgt
        self._tgt_indptr, self._tgt_nbrs = _csr(edge_tgt, edge_src, n_t)
        self._source_index: dict[str, int] | None = None
        self._target_index: dict[str, int] | None = None

    @classmethod
    def from_arrays(
        cls,
        n_sources: int,
        n_targets: int,
        src: Iterable[int] | np.ndarray,
        tgt: Iterable[int] | np.ndarray,
        source_labels: Sequence[str] | None = None,
        target_labels: Sequence[str] | None = None,
    ) -> BipartiteGraph:
        """Build from integer endpoint arrays; duplicates are collapsed.

        Default labels are ``s0, s1, ...`` and ``t0, t1, ...``.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        tgt = np.asarray(tgt, dtype=np.int64).ravel()
        if src.shape != tgt.shape:
            raise IngestError("source and target arrays differ in length")
        if src.size and (src.min() < 0 or src.max() >= n_sources):
            raise IngestError("source id out of range")
        if tgt.size and (tgt.min() < 0 or tgt.max() >= n_targets):
            raise IngestError("target id out of range")
        if source_labels is None:
            source_labels = [f"s{i}" for i in range(n_sources)]
        if target_labels is None:
            target_labels = [f"t{i}" for i in range(n_targets)]
        if len(source_labels) != n_sources or len(target_labels) != n_targets:
            raise IngestError("label count does not match node count")
        key = np.unique(src * max(n_targets, 1) + tgt)
        if n_targets:
            s, t = np.divmod(key, n_targets)
        else:
            s = t = key
        return cls(source_labels, target_labels, s, t)

    # -- sizes -------------------------------------------------------------

    @property
    def n_sources(self) -> int:
        return len(self.source_labels)

    @property
    def n_targets(self) -> int:
        return len(self.target_labels)

    @property
    def n_edges(self) -> int:
        return int(self.edge_src.size)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return set(zip(self.edge_src.tolist(), self.edge_tgt.tolist()))

    def source_degrees(self) -> np.ndarray:
        return np.diff(self._src_indptr)

    def target_degrees(self) -> np.ndarray:
        return np.diff(self._tgt_indptr)

    # -- lookups -----------------------------------------------------------

    def source_id(self, label: str) -> int:
        if self._source_index is None:
            self._source_index = {lab: i for i, lab in enumerate(self.source_labels)}
        try:
            return self._source_index[label]
        except KeyError:
            raise UnknownNodeError(f"unknown source label {label!r}") from None

    def target_id(self, label: str) -> int:
        if self._target_index is None:
            self._target_index = {lab: i for i, lab in enumerate(self.target_labels)}
        try:
            return self._target_index[label]
        except KeyError:
            raise UnknownNodeError(f"unknown target label {label!r}") from None

    def source_neighbors(self, n: int) -> np.ndarray:
        """Targets adjacent to source ``n`` (ascending)."""
        if not 0 <= n < self.n_sources:
            raise UnknownNodeError(f"unknown source node {n}")
        return self._src_nbrs[self._src_indptr[n] : self._src_indptr[n + 1]]

    def target_neighbors(self, m: int) -> np.ndarray:
        """Sources adjacent to target ``m`` (ascending)."""
        if not 0 <= m < self.n_targets:
            raise UnknownNodeError(f"unknown target node {m}")
        return self._tgt_nbrs[self._tgt_indptr[m] : self._tgt_indptr[m + 1]]

    def has_edge(self, n: int, m: int) -> bool:
        row = self.source_neighbors(n)
        i = int(np.searchsorted(row, m))
        return i < row.size and int(row[i]) == m

    def target_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, sources)`` with each target's sources ascending."""
        return self._tgt_indptr, self._tgt_nbrs

    def label_edges(self) -> list[tuple[str, str]]:
        sl, tl = self.source_labels, self.target_labels
        return [(sl[s], tl[t]) for s, t in zip(self.edge_src.tolist(), self.edge_tgt.tolist())]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (
            self.source_labels == other.source_labels
            and self.target_labels == other.target_labels
            and np.array_equal(self.edge_src, other.edge_src)
            and np.array_equal(self.edge_tgt, other.edge_tgt)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"BipartiteGraph(n_sources={self.n_sources}, "
            f"n_targets={self.n_targets}, n_edges={self.n_edges})"
        )


def ingest_edges(records: Iterable[Sequence[str]]) -> BipartiteGraph:
    """Intern ``(source_label, target_label)`` records into a graph.

    Labels are interned per side in order of first appearance and duplicate
    edges collapse. A record with the wrong number of fields, or an empty
    label, raises :class:`IngestError` naming its 1-based position.
    """
    src_index: dict[str, int] = {}
    tgt_index: dict[str, int] = {}
    src: list[int] = []
    tgt: list[int] = []
    for lineno, rec in enumerate(records, start=1):
        if isinstance(rec, str) or len(rec) != 2:
            raise IngestError(f"line {lineno}: expected 2 fields, got {_field_count(rec)}")
        a, b = rec
        if not a or not b:
            raise IngestError(f"line {lineno}: empty label")
        src.append(src_index.setdefault(a, len(src_index)))
        tgt.append(tgt_index.setdefault(b, len(tgt_index)))
    return BipartiteGraph.from_arrays(
        len(src_index), len(tgt_index), src, tgt, list(src_index), list(tgt_index)
    )


def _field_count(rec: object) -> int:
    if isinstance(rec, str):
        return 1
    try:
        return len(rec)  # type: ignore[arg-type]
    except TypeError:
        return 1


def neighbors_of_target(g: BipartiteGraph, m: int) -> set[int]:
    """``I(m)``: the source nodes sharing an edge with target ``m``."""
    return set(g.target_neighbors(m).tolist())


def neighbors_of_source(g: BipartiteGraph, n: int) -> set[int]:
    """``H(n)``: the target nodes sharing an edge with source ``n``."""
    return set(g.source_neighbors(n).tolist())


def transpose(g: BipartiteGraph) -> BipartiteGraph:
    """Swap the roles of sources and targets."""
    return BipartiteGraph.from_arrays(
        g.n_targets, g.n_sources, g.edge_tgt, g.edge_src, g.target_labels, g.source_labels
    )


def _iter_edge_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise IngestError(f"{path}:{lineno}: expected 'source<TAB>target'")
            yield fields


def read_edge_list(path: str | Path) -> BipartiteGraph:
    """Read a TAB-separated ``source<TAB>target`` file; ``#`` lines are skipped."""
    return ingest_edges(_iter_edge_lines(Path(path)))


def write_edge_list(g: BipartiteGraph, fh) -> None:
    for s, t in g.label_edges():
        fh.write(f"{s}\t{t}\n")
