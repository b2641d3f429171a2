"""Maximum persistence probability communities: heuristics, exact oracle, MILP export and LFR benchmarks."""

from .graph import Graph, GraphError, ParseError, parse_edge_list, read_edge_list
from .persistence import CommunitySolution, DisconnectedSetError, MergePartition, alpha_of
from .shrink import PersistenceCurve, random_shrink
from .localsearch import SearchParams, crr, interchange, rsi, rsvns, tree_vns
from .exact import enumerate_connected_subsets, exact_max_persistence
from .milp import MilpModel, build_p1, write_lp
from .benchgen import LfrParams, PlantedGraph, generate_lfr, realized_mixing
from .curve import find_peaks, score_against_truth, select_k

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphError", "ParseError", "parse_edge_list", "read_edge_list",
    "CommunitySolution", "DisconnectedSetError", "MergePartition", "alpha_of",
    "PersistenceCurve", "random_shrink",
    "SearchParams", "crr", "interchange", "rsi", "rsvns", "tree_vns",
    "enumerate_connected_subsets", "exact_max_persistence",
    "MilpModel", "build_p1", "write_lp",
    "LfrParams", "PlantedGraph", "generate_lfr", "realized_mixing",
    "find_peaks", "score_against_truth", "select_k",
    "karate_path",
]


def karate_path() -> str:
    """Path of the bundled karate-club edge list."""
    from importlib.resources import files

    return str(files(__name__) / "data" / "karate.txt")
