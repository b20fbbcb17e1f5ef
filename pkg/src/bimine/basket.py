"""Baskets: F-scored target neighborhoods in a global source order."""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np

from .graph import BipartiteGraph, UnknownNodeError

__all__ = [
    "Basket",
    "ConsistencyError",
    "EmptyGraphError",
    "GOrder",
    "Mode",
    "basket_mass",
    "build_baskets",
    "f_score",
    "f_scores",
]

DEFAULT_C = 1.0


class EmptyGraphError(ValueError):
    """Raised when an operation needs at least one edge."""


class ConsistencyError(RuntimeError):
    """Raised when a construction self-check fails."""


class Mode(enum.Enum):
    """How target in-degree maps to suspiciousness.

    ``AOBG`` (account-object): popular targets are *less* suspicious.
    ``ARBG`` (account-resource): heavily shared targets are *more* suspicious.
    """

    AOBG = "aobg"
    ARBG = "arbg"

    @classmethod
    def parse(cls, value: Union[str, Mode]) -> Mode:
        if isinstance(value, Mode):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown mode {value!r}; expected 'aobg' or 'arbg'") from None


def _check_c(c: float) -> None:
    if not c > 0 or not math.isfinite(c):
        raise ValueError(f"c must be a positive finite number, got {c!r}")


def f_score(graph: BipartiteGraph, m: int, mode: Mode | str, c: float = DEFAULT_C) -> float:
    """F-score of target ``m``: ``ln(|E|/(|I(m)|+c))`` (AOBG) or ``ln(|I(m)|+c)`` (ARBG)."""
    mode = Mode.parse(mode)
    _check_c(c)
    if graph.n_edges == 0:
        raise EmptyGraphError("F-score is undefined on a graph without edges")
    if not 0 <= m < graph.n_targets:
        raise UnknownNodeError(f"unknown target node {m}")
    deg = int(graph.target_degrees()[m])
    if mode is Mode.AOBG:
        return math.log(graph.n_edges / (deg + c))
    return math.log(deg + c)


def f_scores(graph: BipartiteGraph, mode: Mode | str, c: float = DEFAULT_C) -> np.ndarray:
    """Vectorised :func:`f_score` for every target."""
    mode = Mode.parse(mode)
    _check_c(c)
    if graph.n_edges == 0:
        raise EmptyGraphError("F-score is undefined on a graph without edges")
    deg = graph.target_degrees().astype(np.float64)
    if mode is Mode.AOBG:
        return np.log(graph.n_edges / (deg + c))
    return np.log(deg + c)


@dataclass(frozen=True)
class Basket:
    """A target ``m``, its source neighbors in global order, and ``f(m)``."""

    m: int
    ordered_sources: tuple[int, ...]
    f: float

    def __len__(self) -> int:
        return len(self.ordered_sources)


@dataclass(frozen=True, eq=False)
class GOrder:
    """Global source order: ``g`` descending, then ascending id.

    ``rank[n]`` is the position of source ``n`` in that order.
    """

    g: np.ndarray
    rank: np.ndarray

    @classmethod
    def from_keys(cls, g: np.ndarray, primary: np.ndarray | None = None) -> GOrder:
        ids = np.arange(g.size)
        key = -g if primary is None else primary
        order = np.lexsort((ids, key))
        rank = np.empty_like(order)
        rank[order] = ids
        return cls(g, rank)

    def precedes(self, a: int, b: int) -> bool:
        return bool(self.rank[a] < self.rank[b])

    def sorted(self, sources: Sequence[int]) -> list[int]:
        return sorted(sources, key=lambda n: self.rank[n])


# "g" (default), "id" (plain ascending node id), or a callable
# ``(graph, g) -> key`` whose ascending order defines precedence.
OrderSpec = Union[str, Callable[[BipartiteGraph, np.ndarray], np.ndarray]]


def _global_order(graph: BipartiteGraph, f: np.ndarray, order: OrderSpec) -> GOrder:
    g = np.bincount(graph.edge_src, weights=f[graph.edge_tgt], minlength=graph.n_sources)
    if order == "g":
        return GOrder.from_keys(g)
    if order == "id":
        return GOrder.from_keys(g, primary=np.zeros(graph.n_sources))
    if callable(order):
        return GOrder.from_keys(g, primary=np.asarray(order(graph, g), dtype=np.float64))
    raise ValueError(f"unknown ordering {order!r}")


def ordered_basket_arrays(
    graph: BipartiteGraph, rank: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """CSR ``(indptr, sources)`` with each target's sources sorted by ``rank``."""
    indptr, nbrs = graph.target_csr()
    n_s = max(graph.n_sources, 1)
    owner = np.repeat(np.arange(graph.n_targets, dtype=np.int64), np.diff(indptr))
    perm = np.argsort(owner * n_s + rank[nbrs], kind="stable")
    return indptr, nbrs[perm]


def build_baskets(
    graph: BipartiteGraph,
    mode: Mode | str,
    c: float = DEFAULT_C,
    order: OrderSpec = "g",
) -> tuple[list[Basket], GOrder]:
    """One basket per target (ascending target id) plus the global order.

    ``g(n)`` is the sum of ``f(m)`` over the targets of ``n``; it is computed
    once from the whole graph before any basket is sorted, so every basket
    orders shared sources identically.
    """
    f = f_scores(graph, mode, c)
    gorder = _global_order(graph, f, order)
    indptr, seq = ordered_basket_arrays(graph, gorder.rank)
    flat = seq.tolist()
    bounds = indptr.tolist()
    fl = f.tolist()
    baskets = [
        Basket(m, tuple(flat[bounds[m] : bounds[m + 1]]), fl[m]) for m in range(graph.n_targets)
    ]
    return baskets, gorder


def basket_mass(baskets: Sequence[Basket], expected: int | None = None) -> int:
    """Total basket length; raises :class:`ConsistencyError` if it differs from ``expected``."""
    mass = sum(len(b.ordered_sources) for b in baskets)
    if expected is not None and mass != expected:
        raise ConsistencyError(f"basket mass {mass} != edge count {expected}")
    return mass
