"""Independent reference implementations used to validate the package.

Everything here is deliberately written by a different route than the
production code: the walk mirror is plain Python over the shared RNG, the
Markov oracle solves the exact linear system, the projector oracle builds
full matrices from per-element bit arithmetic, and the renewal oracle
solves the absorbing-chain equations instead of using the closed form.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from mdsat.rng import SplitMix64
from mdsat.sat import Clause, Formula, evaluate_clause, evaluate_formula


# ---------------------------------------------------------------------------
# pure-Python mirror of the jitted walk kernel (call-for-call RNG match)


def python_walk(f: Formula, seed: int, c_max: int | None = None,
                max_checks: int | None = None):
    """Returns (solution | None, checks, flips, restarts); must agree
    exactly with the compiled kernel for the same seed."""
    rng = SplitMix64(seed)
    n, m = f.n, f.m
    a = np.zeros(n, dtype=np.uint8)
    perm = list(range(m))
    checks = 0
    flips = 0
    restarts = -1
    while True:
        restarts += 1
        for i in range(n):
            a[i] = 1 if rng.next_bool() else 0
        c = 1
        while True:
            rng.shuffle(perm)
            failed = -1
            for ci in perm:
                checks += 1
                clause = f.clauses[ci]
                ok = False
                for lit in clause.literals:
                    if bool(a[lit.var_index]) != lit.negated:
                        ok = True
                        break
                if not ok:
                    failed = ci
                    break
            if failed < 0:
                return a.astype(bool), checks, flips, restarts
            if max_checks is not None and checks >= max_checks:
                return None, checks, flips, restarts
            if c_max is not None and c > c_max:
                break
            t = rng.next_below(3)
            v = f.clauses[failed].literals[t].var_index
            a[v] = 1 - a[v]
            flips += 1
            c += 1


# ---------------------------------------------------------------------------
# exact expected checks of the unlimited walk via its Markov chain


def markov_expected_checks(f: Formula) -> float:
    """E[checks] of the c_max-unlimited walk from a uniform start.

    V(a) = m for satisfying a (the final verifying pass);
    V(a) = (m+1)/(f+1) + (1/f) sum_{C in F(a)} (1/3) sum_{v in C} V(a^v)
    otherwise, where f = |F(a)| and (m+1)/(f+1) is the expected position
    of the first failing clause in a uniformly ordered pass.
    """
    n, m = f.n, f.m
    size = 1 << n
    rows, cols, vals = [], [], []
    rhs = np.empty(size)
    a = np.zeros(n, dtype=bool)
    for x in range(size):
        for i in range(n):
            a[i] = (x >> i) & 1
        failing = [c for c in f.clauses if not evaluate_clause(c, a)]
        rows.append(x)
        cols.append(x)
        vals.append(1.0)
        if not failing:
            rhs[x] = float(m)
            continue
        fcount = len(failing)
        rhs[x] = (m + 1) / (fcount + 1)
        w = 1.0 / (3.0 * fcount)
        for clause in failing:
            for lit in clause.literals:
                y = x ^ (1 << lit.var_index)
                rows.append(x)
                cols.append(y)
                vals.append(-w)
        # duplicate (x, y) entries sum, matching repeated flip targets
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
    v = spla.spsolve(mat, rhs)
    return float(v.mean())


# ---------------------------------------------------------------------------
# dense clause-check oracle built from per-element bit arithmetic


def violating_vector_direct(clause: Clause, theta: float) -> np.ndarray:
    """8-vector of the clause's violating product state, first literal
    slowest (index = 4 b0 + 2 b1 + b2)."""
    alpha = math.pi / 4 + theta / 2
    singles = []
    for lit in clause.literals:
        if lit.negated:
            u = np.array([-math.cos(alpha), math.sin(alpha)])
        else:
            u = np.array([-math.sin(alpha), math.cos(alpha)])
        singles.append(u)
    v = np.zeros(8)
    for b0 in range(2):
        for b1 in range(2):
            for b2 in range(2):
                v[4 * b0 + 2 * b1 + b2] = (
                    singles[0][b0] * singles[1][b1] * singles[2][b2]
                )
    return v


def dense_violation_projector(n: int, clause: Clause, theta: float) -> np.ndarray:
    """Full (2^n, 2^n) matrix of P = |v><v| x I_rest, elementwise."""
    v8 = violating_vector_direct(clause, theta)
    vs = [lit.var_index for lit in clause.literals]
    mask = (1 << vs[0]) | (1 << vs[1]) | (1 << vs[2])
    size = 1 << n

    def pat(x: int) -> int:
        b0 = (x >> vs[0]) & 1
        b1 = (x >> vs[1]) & 1
        b2 = (x >> vs[2]) & 1
        return 4 * b0 + 2 * b1 + b2

    p = np.zeros((size, size))
    for x in range(size):
        for y in range(size):
            if (x ^ y) & ~mask == 0:
                p[x, y] = v8[pat(x)] * v8[pat(y)]
    return p


# ---------------------------------------------------------------------------
# renewal oracle: absorbing-chain linear system


def chain_expected_checks(q) -> float:
    """Expected checks to absorb for the restart process with per-check
    pass probabilities q: from position t, one check leads to t+1 w.p.
    q[t] and back to 0 otherwise; absorption after the last check."""
    q = list(q)
    t_len = len(q)
    a = np.zeros((t_len, t_len))
    b = np.ones(t_len)
    for t in range(t_len):
        a[t, t] = 1.0
        if t + 1 < t_len:
            a[t, t + 1] -= q[t]
        a[t, 0] -= 1.0 - q[t]
    v = np.linalg.solve(a, b)
    return float(v[0])


# ---------------------------------------------------------------------------
# brute-force solution enumeration (independent of satisfying_table)


def brute_solutions(f: Formula) -> list[np.ndarray]:
    out = []
    a = np.zeros(f.n, dtype=bool)
    for x in range(1 << f.n):
        for i in range(f.n):
            a[i] = (x >> i) & 1
        if evaluate_formula(f, a):
            out.append(a.copy())
    return out


def binom_tail_direct(r: int, p: float) -> float:
    """P[Binom(r, p) <= (r-1)/2] via scipy's regularized beta route."""
    from scipy.stats import binom

    return float(binom.cdf((r - 1) // 2, r, p))
