"""Seed-driven fuzzy community detection via absorbed random walks."""

__version__ = "0.1.0"

from .bench import CellSummary, TrialResult, histogram, quality, run_sweep, seed_resample_qualities
from .detect import AffinityMatrix, assign_crisp, detect_multi, detect_single
from .errors import (
    ConvergenceError,
    GenerationError,
    ParseError,
    ReachabilityError,
    SeedwalkError,
)
from .graph import Graph, check_seed_reachability, load_edge_list, write_edge_list
from .lfr import LfrParams, PlantedGraph, generate, mixing_fraction, sample_power_law, sample_seeds
from .markov import AbsorbingChain, build_chain, transition_row
from .seeds import SeedSet, load_seed_file, write_seed_file
from .solver import (
    AbsorbingSystem,
    SolveReport,
    assemble,
    solve_direct,
    solve_iterative,
)
from .walker import WalkStats, estimate_affinity, run_walks

__all__ = [
    "AbsorbingChain",
    "AbsorbingSystem",
    "AffinityMatrix",
    "CellSummary",
    "ConvergenceError",
    "GenerationError",
    "Graph",
    "LfrParams",
    "ParseError",
    "PlantedGraph",
    "ReachabilityError",
    "SeedSet",
    "SeedwalkError",
    "SolveReport",
    "TrialResult",
    "WalkStats",
    "assemble",
    "assign_crisp",
    "build_chain",
    "check_seed_reachability",
    "detect_multi",
    "detect_single",
    "estimate_affinity",
    "generate",
    "histogram",
    "load_edge_list",
    "load_seed_file",
    "mixing_fraction",
    "quality",
    "run_sweep",
    "run_walks",
    "sample_power_law",
    "sample_seeds",
    "seed_resample_qualities",
    "solve_direct",
    "solve_iterative",
    "transition_row",
    "write_edge_list",
    "write_seed_file",
]
