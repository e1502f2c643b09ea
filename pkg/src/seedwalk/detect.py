"""Single- and multi-community detection: the user-facing model.

The affinity of a non-seed node is the absorption-probability-weighted
mix of the seed affinities, realized as one linear solve per community on
a shared system. Crisp assignment takes the argmax per node.
"""

from __future__ import annotations

from typing import IO

import numpy as np

from . import solver
from .errors import ConvergenceError
from .graph import Graph
from .markov import build_chain
from .seeds import SeedSet

SOLVER_MODES = ("auto", "direct", "iterative")


class AffinityMatrix:
    """Per-node affinity vectors: computed rows for transient nodes, the
    given rows for seeds.

    rows holds the raw solver output (ascending transient id); clamping to
    [0, 1] happens only at output boundaries so that linearity in the seed
    affinities stays observable.
    """

    __slots__ = ("transient_ids", "rows", "seed_ids", "seed_rows", "l", "reports")

    def __init__(self, transient_ids, rows, seed_ids, seed_rows, reports=None):
        self.transient_ids = transient_ids
        self.rows = rows
        self.seed_ids = seed_ids
        self.seed_rows = seed_rows
        self.l = rows.shape[1] if rows.size else seed_rows.shape[1]
        self.reports = reports

    @property
    def n(self) -> int:
        return self.transient_ids.size + self.seed_ids.size

    def full_rows(self) -> np.ndarray:
        """(n x l) matrix over all nodes, raw values."""
        out = np.empty((self.n, self.l))
        out[self.transient_ids] = self.rows
        out[self.seed_ids] = self.seed_rows
        return out

    def clamped_rows(self) -> np.ndarray:
        """(n x l) matrix over all nodes, clipped to [0, 1]."""
        return np.clip(self.full_rows(), 0.0, 1.0)

    def row_for(self, node: int) -> np.ndarray:
        return self.full_rows()[node]


def detect_multi(
    g: Graph,
    seeds: SeedSet,
    solver_mode: str = "auto",
    tol: float = solver.DEFAULT_TOL,
    max_iter: int | None = None,
) -> AffinityMatrix:
    """Affinity vectors for all non-seed nodes, one solve per community.

    The system is assembled and factorized/preconditioned once; the l
    right-hand sides reuse it. Raises ReachabilityError if some node cannot
    reach a seed, ConvergenceError if the iterative solver runs out of
    budget.
    """
    if solver_mode not in SOLVER_MODES:
        raise ValueError(f"solver_mode must be one of {SOLVER_MODES}")
    chain = build_chain(g, seeds.ids)
    system = solver.assemble(chain, seeds)
    mode = solver_mode
    if mode == "auto":
        mode = "direct" if system.dim <= solver.DENSE_CAP else "iterative"
    reports = None
    if mode == "direct":
        X = solver.solve_direct_all(system)
    else:
        X, reports = solver.solve_iterative_all(system, tol=tol, max_iter=max_iter)
        if not all(r.converged for r in reports):
            raise ConvergenceError(reports)
    return AffinityMatrix(
        transient_ids=chain.transient,
        rows=X,
        seed_ids=seeds.ids.copy(),
        seed_rows=seeds.rows.copy(),
        reports=reports,
    )


def detect_single(
    g: Graph,
    seeds: SeedSet,
    solver_mode: str = "auto",
    tol: float = solver.DEFAULT_TOL,
    max_iter: int | None = None,
) -> AffinityMatrix:
    """Single-community case (l must be 1)."""
    if seeds.l != 1:
        raise ValueError(f"detect_single requires l=1 seed affinities, got l={seeds.l}")
    return detect_multi(g, seeds, solver_mode=solver_mode, tol=tol, max_iter=max_iter)


def assign_crisp(aff: AffinityMatrix) -> dict[int, int]:
    """Node -> argmax community; ties break to the lowest community index.

    Seed nodes are assigned from their given affinity rows.
    """
    best = np.argmax(aff.full_rows(), axis=1)
    return {v: int(c) for v, c in enumerate(best)}


def write_affinity_csv(aff: AffinityMatrix, g: Graph, stream: IO[str]) -> None:
    """One row per node: label then clamped affinities at 9 significant digits."""
    header = "node," + ",".join(f"c{i}" for i in range(aff.l))
    stream.write(header + "\n")
    rows = aff.clamped_rows()
    for v in range(aff.n):
        vals = ",".join(f"{x:.9g}" for x in rows[v])
        stream.write(f"{g.labels[v]},{vals}\n")


def write_crisp_csv(aff: AffinityMatrix, g: Graph, stream: IO[str]) -> None:
    stream.write("node,community\n")
    crisp = assign_crisp(aff)
    for v in range(aff.n):
        stream.write(f"{g.labels[v]},{crisp[v]}\n")
