"""Absorbed-walk semantics: seeds become absorbing, everything else is transient.

A walk at a transient node moves to a uniformly random neighbor (degree taken
in the original undirected graph); a walk at a seed never leaves. The implicit
transition structure is the block matrix [[Q, R], [0, I]] over the
transient/absorbing partition; Q and R are never materialized, consumers
iterate rows.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import ReachabilityError
from .graph import Graph, check_seed_reachability


class AbsorbingChain:
    """Transient/absorbing partition of a graph's walk chain.

    transient_index maps node id -> position in 0..tau-1 (-1 for seeds);
    absorbing_index maps node id -> position in 0..sigma-1 (-1 for others).
    Both orderings are ascending original node id, so results are
    deterministic across runs.
    """

    __slots__ = ("graph", "seeds", "transient", "transient_index", "absorbing_index")

    def __init__(self, graph: Graph, seeds: np.ndarray):
        self.graph = graph
        self.seeds = seeds
        mask = np.ones(graph.n, dtype=bool)
        mask[seeds] = False
        self.transient = np.flatnonzero(mask)
        self.transient_index = np.full(graph.n, -1, dtype=np.int64)
        self.transient_index[self.transient] = np.arange(self.transient.size)
        self.absorbing_index = np.full(graph.n, -1, dtype=np.int64)
        self.absorbing_index[self.seeds] = np.arange(self.seeds.size)

    @property
    def tau(self) -> int:
        return self.transient.size

    @property
    def sigma(self) -> int:
        return self.seeds.size

    def is_seed(self, v: int) -> bool:
        return self.absorbing_index[v] >= 0


def build_chain(g: Graph, seeds: Iterable[int]) -> AbsorbingChain:
    """Make seeds absorbing; every non-seed must reach some seed.

    Raises ReachabilityError listing the offending nodes otherwise.
    seeds = all nodes is a valid degenerate chain with tau = 0.
    """
    seed_arr = np.unique(np.fromiter(seeds, dtype=np.int64))
    if seed_arr.size == 0:
        raise ValueError("seed set is empty")
    unreachable = check_seed_reachability(g, seed_arr)
    if unreachable.size:
        raise ReachabilityError(unreachable.tolist())
    return AbsorbingChain(g, seed_arr)


def transition_row(chain: AbsorbingChain, v: int) -> list[tuple[int, float]]:
    """Out-transitions of transient node v: (neighbor, 1/deg(v)) per neighbor."""
    if chain.is_seed(v):
        raise ValueError(f"node {v} is absorbing; its row is the implicit identity")
    nbrs = chain.graph.neighbors(v)
    p = 1.0 / nbrs.size
    return [(int(w), p) for w in nbrs]
