"""Suspiciousness trees and forests over bipartite graphs.

Build an S-tree from ordered target baskets, enumerate maximal
half-isolated bicliques exactly, and rank sources by suspiciousness on a
single graph (:func:`detect`) or across the attributes of a 1+K dataset
(:func:`build_forest` / :func:`forest_scores`).
"""

from .basket import Basket, ConsistencyError, EmptyGraphError, Mode, build_baskets, f_score
from .detector import BoundaryParams, SuspiciousnessRanking, detect, detect_full
from .graph import BipartiteGraph, IngestError, ingest_edges, read_edge_list, transpose
from .metrics import LabeledRanking, auc, best_f1
from .mhibp import Biclique, BicliqueSet, brute_force_mhi, solve_mhibp
from .sforest import KDataset, build_forest, forest_scores, read_kdataset
from .stree import STree, build_stree

__all__ = [
    "Basket",
    "Biclique",
    "BicliqueSet",
    "BipartiteGraph",
    "BoundaryParams",
    "ConsistencyError",
    "EmptyGraphError",
    "IngestError",
    "KDataset",
    "LabeledRanking",
    "Mode",
    "STree",
    "SuspiciousnessRanking",
    "auc",
    "best_f1",
    "brute_force_mhi",
    "build_baskets",
    "build_forest",
    "build_stree",
    "detect",
    "detect_full",
    "f_score",
    "forest_scores",
    "ingest_edges",
    "read_edge_list",
    "read_kdataset",
    "solve_mhibp",
    "transpose",
]

__version__ = "0.1.0"
