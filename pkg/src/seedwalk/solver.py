"""Assemble and solve the transient-subgraph system (D - A) x = D b.

D is the diagonal of original-graph degrees of the transient nodes, A the
adjacency of the transient-induced subgraph. The right-hand side for
community i collapses to, per transient node, the affinity-weighted count
of its seed neighbors. One matrix serves all l communities: the dense
factorization (or the Jacobi preconditioner) is built once and reused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import SeedwalkError
from .markov import AbsorbingChain
from .seeds import SeedSet

DENSE_CAP = 2000
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class SolveReport:
    """Telemetry for one iterative solve."""

    iterations: int
    relative_residual: float
    converged: bool


class AbsorbingSystem:
    """The assembled system: diag, transient-subgraph adjacency, all l RHS."""

    __slots__ = ("chain", "dim", "diag", "sub_offsets", "sub_targets", "rhs", "_matrix", "_lu")

    def __init__(self, chain, dim, diag, sub_offsets, sub_targets, rhs):
        self.chain = chain
        self.dim = dim
        self.diag = diag
        self.sub_offsets = sub_offsets
        self.sub_targets = sub_targets
        self.rhs = rhs
        self._matrix = None
        self._lu = None

    @property
    def communities(self) -> int:
        return self.rhs.shape[1]

    def matrix(self) -> scipy.sparse.csr_matrix:
        """Sparse D - A over the transient subgraph (cached)."""
        if self._matrix is None:
            off = scipy.sparse.csr_matrix(
                (np.full(self.sub_targets.size, -1.0), self.sub_targets, self.sub_offsets),
                shape=(self.dim, self.dim),
            )
            self._matrix = (scipy.sparse.diags(self.diag) + off).tocsr()
        return self._matrix


def assemble(chain: AbsorbingChain, affinities: SeedSet) -> AbsorbingSystem:
    """Build diag, transient-subgraph adjacency, and the l right-hand sides.

    The SeedSet must cover exactly the chain's seeds. rhs[v, i] is the sum
    of beta_i(s) over seed neighbors s of transient node v.
    """
    if not np.array_equal(affinities.ids, chain.seeds):
        raise ValueError("seed ids of the affinity set do not match the chain's seeds")
    g = chain.graph
    tnodes = chain.transient
    tau = tnodes.size
    l = affinities.l
    diag = (g.offsets[tnodes + 1] - g.offsets[tnodes]).astype(np.float64)

    if tau == 0:
        return AbsorbingSystem(
            chain, 0, diag, np.zeros(1, dtype=np.int64), np.empty(0, dtype=np.int64), np.empty((0, l))
        )

    # flatten all transient adjacency rows
    starts = g.offsets[tnodes]
    counts = (g.offsets[tnodes + 1] - starts).astype(np.int64)
    total = int(counts.sum())
    base = np.repeat(starts, counts)
    step = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    nbrs = g.targets[base + step]
    row_of = np.repeat(np.arange(tau, dtype=np.int64), counts)

    abs_idx = chain.absorbing_index[nbrs]
    seed_mask = abs_idx >= 0

    rhs = np.zeros((tau, l))
    np.add.at(rhs, row_of[seed_mask], affinities.rows[abs_idx[seed_mask]])

    keep = ~seed_mask
    sub_targets = chain.transient_index[nbrs[keep]]
    sub_counts = np.bincount(row_of[keep], minlength=tau)
    sub_offsets = np.zeros(tau + 1, dtype=np.int64)
    np.cumsum(sub_counts, out=sub_offsets[1:])

    # SDD by construction: transient-subgraph degree never exceeds the full degree
    if (sub_counts > diag).any():
        raise SeedwalkError("assembled system violates diagonal dominance")

    return AbsorbingSystem(chain, tau, diag, sub_offsets, sub_targets.astype(np.int64), rhs)


def _dense_lu(system: AbsorbingSystem):
    if system._lu is None:
        dense = system.matrix().toarray()
        system._lu = scipy.linalg.lu_factor(dense)
    return system._lu


def solve_direct(system: AbsorbingSystem, community: int) -> np.ndarray:
    """Exact solve of one community's system by dense LU (tau <= DENSE_CAP)."""
    if system.dim > DENSE_CAP:
        raise ValueError(f"dim {system.dim} exceeds the dense cap {DENSE_CAP}")
    b = system.rhs[:, community]
    if system.dim == 0:
        return np.empty(0)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(system.dim)
    x = scipy.linalg.lu_solve(_dense_lu(system), b)
    resid = np.linalg.norm(system.matrix() @ x - b)
    if resid > 1e-10 * bnorm:
        raise SeedwalkError(f"direct solve residual {resid:.3e} exceeds 1e-10 * |rhs|")
    return x


def solve_direct_all(system: AbsorbingSystem) -> np.ndarray:
    """All communities at once against the single cached factorization."""
    if system.dim > DENSE_CAP:
        raise ValueError(f"dim {system.dim} exceeds the dense cap {DENSE_CAP}")
    if system.dim == 0:
        return np.empty((0, system.communities))
    X = np.zeros_like(system.rhs)
    bnorm = np.linalg.norm(system.rhs, axis=0)
    nz = np.flatnonzero(bnorm > 0)
    if nz.size:
        X[:, nz] = scipy.linalg.lu_solve(_dense_lu(system), system.rhs[:, nz])
        resid = np.linalg.norm(system.matrix() @ X[:, nz] - system.rhs[:, nz], axis=0)
        if (resid > 1e-10 * bnorm[nz]).any():
            raise SeedwalkError("direct solve residual exceeds 1e-10 * |rhs|")
    return X


def solve_iterative(
    system: AbsorbingSystem,
    community: int,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Jacobi-preconditioned CG on one community's right-hand side.

    Stops when the true relative residual ||(D-A)x - b|| / ||b|| drops
    below tol; on budget exhaustion the best iterate is returned with
    converged=False.
    """
    X, reports = solve_iterative_all(system, tol=tol, max_iter=max_iter, columns=[community])
    return X[:, 0], reports[0]


def solve_iterative_all(
    system: AbsorbingSystem,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    columns=None,
) -> tuple[np.ndarray, list[SolveReport]]:
    """PCG over many right-hand sides with batched matvecs.

    Columns are mathematically independent (per-column step sizes), so
    results match one-at-a-time solves; converged columns freeze early.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = 10 * system.dim + 100
    B = system.rhs if columns is None else system.rhs[:, list(columns)]
    ncol = B.shape[1]
    if system.dim == 0:
        return np.empty((0, ncol)), [SolveReport(0, 0.0, True)] * ncol

    L = system.matrix()
    inv_diag = 1.0 / system.diag
    bnorm = np.linalg.norm(B, axis=0)
    X = np.zeros_like(B)
    used = np.zeros(ncol, dtype=np.int64)

    # zero rhs short-circuits to the zero vector
    pending = np.flatnonzero(bnorm > 0)
    # a few restart rounds catch columns whose recursive residual stopped
    # short of the true one (rare)
    for _ in range(4):
        if pending.size == 0:
            break
        it = _pcg_core(L, inv_diag, B, X, tol * bnorm, max_iter - used, pending)
        used += it
        true_rel = _true_relative_residual(L, X, B, bnorm, pending)
        pending = pending[(true_rel > tol) & (used[pending] < max_iter)]

    final_rel = np.zeros(ncol)
    nz = np.flatnonzero(bnorm > 0)
    if nz.size:
        final_rel[nz] = _true_relative_residual(L, X, B, bnorm, nz)
    reports = [
        SolveReport(int(used[j]), float(final_rel[j]), bool(final_rel[j] <= tol))
        for j in range(ncol)
    ]
    return X, reports


def _true_relative_residual(L, X, B, bnorm, cols) -> np.ndarray:
    r = B[:, cols] - L @ X[:, cols]
    return np.linalg.norm(r, axis=0) / bnorm[cols]


def _pcg_core(L, inv_diag, B, X, thresholds, budget, cols) -> np.ndarray:
    """One PCG run over the given columns, updating X in place.

    Returns per-column iteration counts (full-length array). Columns drop
    out of the working set as their recursive residual passes its threshold
    or their budget runs out.
    """
    used = np.zeros(B.shape[1], dtype=np.int64)
    alive = np.asarray(cols, dtype=np.int64)
    Xw = X[:, alive].copy()
    Rw = B[:, alive] - L @ Xw
    Zw = inv_diag[:, None] * Rw
    Pw = Zw.copy()
    rzw = np.einsum("ij,ij->j", Rw, Zw)
    thw = thresholds[alive]
    remw = budget[alive].copy()

    # already satisfied columns exit immediately
    rn = np.linalg.norm(Rw, axis=0)
    done = rn <= thw
    if done.any():
        X[:, alive[done]] = Xw[:, done]
        keep = ~done
        alive, Xw, Rw, Pw, rzw, thw, remw = _compact(alive, Xw, Rw, Pw, rzw, thw, remw, keep)

    while alive.size:
        Ap = L @ Pw
        pAp = np.einsum("ij,ij->j", Pw, Ap)
        with np.errstate(divide="ignore", invalid="ignore"):
            alpha = np.where(pAp > 0.0, rzw / pAp, 0.0)
        Xw += alpha * Pw
        Rw -= alpha * Ap
        used[alive] += 1
        remw -= 1

        rn = np.linalg.norm(Rw, axis=0)
        done = (rn <= thw) | (remw <= 0) | (pAp <= 0.0)
        if done.any():
            X[:, alive[done]] = Xw[:, done]
            keep = ~done
            alive, Xw, Rw, Pw, rzw, thw, remw = _compact(alive, Xw, Rw, Pw, rzw, thw, remw, keep)
            if not alive.size:
                break

        Zw = inv_diag[:, None] * Rw
        rz_new = np.einsum("ij,ij->j", Rw, Zw)
        with np.errstate(divide="ignore", invalid="ignore"):
            beta = np.where(rzw > 0.0, rz_new / rzw, 0.0)
        Pw = Zw + beta * Pw
        rzw = rz_new

    return used


def _compact(alive, Xw, Rw, Pw, rzw, thw, remw, keep):
    return (
        alive[keep],
        Xw[:, keep],
        Rw[:, keep],
        Pw[:, keep],
        rzw[keep],
        thw[keep],
        remw[keep],
    )
