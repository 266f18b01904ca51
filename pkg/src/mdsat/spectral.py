"""Spectral analysis of the average clause-check projector
H = (1/m) sum_i P_i: ground-space dimension, spectral gap, the analytic
gap lower bound, and convergence-rate checks against trajectory data.

Dense diagonalization is exact and the default up to n = 14; above that a
matrix-free operator with Lanczos extremal eigenvalues takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh, eigvalsh
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import CapacityError, ConfigError, ContractError, NonConvergenceError
from .sat import Formula, count_solutions
from .qstate import check_theta, solution_gram, solution_state
from .solver import (
    FixedSchedule,
    IidOrder,
    run_deterministic,
)

DENSE_DEFAULT_MAX = 12
DENSE_HARD_MAX = 14
MATFREE_MAX = 26
GROUND_TOL = 1e-9


def _clause_arrays(f: Formula, theta: float):
    """Per clause: the gather plan index array and the local 8-vector."""
    from .qstate import GatherPlan, clause_projector

    plans = []
    vecs = []
    for c in f.clauses:
        plan = GatherPlan(f.n, tuple(l.var_index for l in c.literals))
        proj = clause_projector(c, theta, f.n, plan)
        plans.append(plan)
        vecs.append(proj.v8)
    return plans, vecs


def build_dense(f: Formula, theta: float) -> np.ndarray:
    """Dense (2^n, 2^n) matrix of the average projector."""
    if f.n > DENSE_HARD_MAX:
        raise CapacityError(f"dense mode caps at n={DENSE_HARD_MAX}, got {f.n}")
    check_theta(theta)
    plans, vecs = _clause_arrays(f, theta)
    dim = 1 << f.n
    h = np.zeros(dim * dim, dtype=np.float64)
    inv_m = 1.0 / f.m
    for plan, v8 in zip(plans, vecs):
        idx = plan.indices().astype(np.int64)
        w = np.real(np.outer(v8, np.conj(v8))) * inv_m
        for p in range(8):
            rows = idx[:, p] * dim
            for qq in range(8):
                np.add.at(h, rows + idx[:, qq], w[p, qq])
    return h.reshape(dim, dim)


class AverageProjectorOperator(LinearOperator):
    """Matrix-free y = Hx applying one rank-1 local update per clause."""

    def __init__(self, f: Formula, theta: float):
        if f.n > MATFREE_MAX:
            raise CapacityError(f"matrix-free mode caps at n={MATFREE_MAX}")
        check_theta(theta)
        self.formula = f
        self.theta = theta
        self.plans, self.vecs = _clause_arrays(f, theta)
        dim = 1 << f.n
        super().__init__(dtype=np.float64, shape=(dim, dim))

    def _matvec(self, x):
        x = np.asarray(x, dtype=np.float64).ravel()
        y = np.zeros_like(x)
        inv_m = 1.0 / self.formula.m
        for plan, v8 in zip(self.plans, self.vecs):
            idx = plan.indices()
            sub = x[idx]
            overlap = sub @ v8
            np.add.at(y, idx, np.outer(overlap, v8) * inv_m)
        return y


def build_hamiltonian(f: Formula, theta: float, mode: str = "auto"):
    if mode == "auto":
        mode = "dense" if f.n <= DENSE_DEFAULT_MAX else "matfree"
    if mode == "dense":
        return build_dense(f, theta)
    if mode == "matfree":
        return AverageProjectorOperator(f, theta)
    raise ConfigError(f"unknown mode {mode!r}")


def _smallest_eigs_dense(h: np.ndarray, k: int) -> np.ndarray:
    return eigvalsh(h, subset_by_index=(0, min(k, h.shape[0]) - 1))


def _smallest_eigs_matfree(op: AverageProjectorOperator, k: int) -> np.ndarray:
    dim = op.shape[0]
    k = min(k, dim - 2)
    try:
        w = eigsh(op, k=k, which="SA", return_eigenvectors=False, tol=1e-12)
    except Exception as exc:  # scipy raises its own no-convergence type
        raise NonConvergenceError(f"Lanczos failed: {exc}") from exc
    return np.sort(w)


def ground_space_dim(h, tol: float = GROUND_TOL) -> int:
    """Count of eigenvalues below tol.

    For dense input this is a full exact spectrum; matrix-free input uses
    Lanczos with increasing k until an eigenvalue at or above tol confirms
    the count is complete.
    """
    if isinstance(h, np.ndarray):
        w = eigvalsh(h)
        return int(np.count_nonzero(w < tol))
    k = 4
    while True:
        w = _smallest_eigs_matfree(h, k)
        below = int(np.count_nonzero(w < tol))
        if below < len(w):
            return below
        if len(w) >= h.shape[0] - 2:
            return below
        k = min(k * 2, h.shape[0] - 2)
        if k > 64:
            raise NonConvergenceError(
                "ground-space dimension exceeds 64; not a 3-SAT projector average"
            )


@dataclass(frozen=True)
class SpectrumSummary:
    n: int
    m: int
    theta: float
    ground_dim: int
    gap: float
    smallest: tuple  # leading eigenvalues, ground space included


def spectral_gap(f: Formula, theta: float, mode: str = "auto",
                 solutions=None, tol: float = GROUND_TOL) -> SpectrumSummary:
    """Ground-space dimension and the gap to the first excited level."""
    h = build_hamiltonian(f, theta, mode)
    if isinstance(h, np.ndarray):
        w = eigvalsh(h)
        gdim = int(np.count_nonzero(w < tol))
        gap = float(w[gdim]) if gdim < len(w) else float("nan")
        return SpectrumSummary(f.n, f.m, theta, gdim, gap,
                               tuple(float(x) for x in w[: gdim + 4]))
    if solutions is None:
        _, solutions = count_solutions(f)
    gdim_expect = len(solutions)
    if gdim_expect == 0:
        w = _smallest_eigs_matfree(h, 6)
        return SpectrumSummary(f.n, f.m, theta, 0, float(w[0]),
                               tuple(float(x) for x in w))
    # deflate the known ground space, then the smallest eigenvalue of the
    # shifted operator is the gap
    basis = np.column_stack(
        [solution_state(a, theta, f.n).amps.real for a in solutions]
    )
    gram = solution_gram(solutions, theta)
    chol = cho_factor(gram)

    def deflated(x):
        y = h @ x
        coeff = cho_solve(chol, basis.T @ x)
        return y + basis @ coeff

    op = LinearOperator(h.shape, matvec=deflated, dtype=np.float64)
    try:
        w = eigsh(op, k=1, which="SA", return_eigenvectors=False, tol=1e-12)
    except Exception as exc:
        raise NonConvergenceError(f"Lanczos failed: {exc}") from exc
    return SpectrumSummary(f.n, f.m, theta, gdim_expect, float(w[0]), (float(w[0]),))


def eigencount_below(f: Formula, theta: float, tol: float = GROUND_TOL,
                     mode: str = "auto") -> int:
    return ground_space_dim(build_hamiltonian(f, theta, mode), tol)


def gap_lower_bound(n: int, m: int, theta: float) -> float:
    """(1/m) sin^6(theta) ((1 - cos theta)/(1 + cos theta))^n.

    Exactly 1/m at theta = pi/2; degenerates to 0 at theta = 0 where the
    check operators lose all distinguishing power.
    """
    check_theta(theta)
    if theta == math.pi / 2:
        return 1.0 / m
    if theta == 0.0:
        return 0.0
    c = math.cos(theta)
    s = math.sin(theta)
    return (s**6 / m) * ((1.0 - c) / (1.0 + c)) ** n


def convergence_bound(k: int, gap: float, initial_overlap: float) -> tuple[float, float]:
    """Fidelity lower bounds after k surviving checks.

    exact: (1 + (1-g)^k (1/ov - 1))^{-1}; approx: 1 - e^{-k g} (1/ov - 1).
    """
    if not 0.0 < initial_overlap <= 1.0:
        raise ContractError("initial overlap must be in (0, 1]")
    if not 0.0 <= gap <= 1.0:
        raise ContractError("gap must be in [0, 1]")
    ratio = 1.0 / initial_overlap - 1.0
    exact = 1.0 / (1.0 + (1.0 - gap) ** k * ratio)
    approx = 1.0 - math.exp(-k * gap) * ratio
    return exact, approx


@dataclass(frozen=True)
class ConvergencePoint:
    checks: int
    fidelity: float
    bound_exact: float
    bound_approx: float


def convergence_check(
    f: Formula,
    theta: float,
    ks,
    seed: int = 0,
    solutions=None,
    mode: str = "auto",
) -> list[ConvergencePoint]:
    """Post-selected subspace fidelity after k random checks versus the
    gap-driven lower bound; the realized fidelity must clear the exact
    bound at every k."""
    from .qstate import apply_clause_check, clause_projector, init_plus, subspace_fidelity
    from .qstate import GatherPlan
    from .rng import SplitMix64

    if solutions is None:
        _, solutions = count_solutions(f)
    solutions = tuple(solutions)
    if not solutions:
        raise ConfigError("convergence check needs a satisfiable formula")
    summary = spectral_gap(f, theta, mode=mode, solutions=solutions)
    gap = summary.gap
    plans = [GatherPlan(f.n, tuple(l.var_index for l in c.literals)) for c in f.clauses]
    projs = [clause_projector(c, theta, f.n, plans[i]) for i, c in enumerate(f.clauses)]

    s = init_plus(f.n)
    ov = subspace_fidelity(s, solutions, theta)
    rng = SplitMix64(seed)
    targets = sorted(int(k) for k in ks)
    out = []
    done = 0
    for k in range(1, targets[-1] + 1):
        ci = rng.next_below(f.m)
        s, _ = apply_clause_check(s, projs[ci], in_place=True, check_norm=False)
        s.renormalize()
        if k == targets[done]:
            fid = subspace_fidelity(s, solutions, theta)
            exact, approx = convergence_bound(k, gap, ov)
            out.append(ConvergencePoint(k, float(fid), exact, approx))
            done += 1
            if done == len(targets):
                break
    return out
