"""Measurement-driven 3-SAT solver: theta schedules, deterministic
post-selected trajectories, renewal-formula expected runtime, Monte-Carlo
cross-validation, noise injection, and repetition analysis.

The deterministic engine simulates the always-pass branch exactly: since a
failed check restarts the whole register and the realized check order is a
frozen function of the order policy and its seed, every surviving attempt
is identical, and per-check pass probabilities q_t fully describe the
restart process. Expected runtimes then come from the renewal formula
rather than sampling.

Cycle bookkeeping: a schedule with horizon c_Q defines angles at steps
c = 0..c_Q inclusive and the engine executes one cycle per step, so a run
performs (c_Q + 1) cycles and ends exactly at the schedule's final angle.
Public cycle labels count completed cycles: row 0 of a bias trace is the
initial state, row k the state after k cycles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CertainFailureError,
    ConfigError,
    ContractError,
    InfiniteExpectationError,
    StructuralError,
)
from .rng import SplitMix64, derive_seed
from .sat import Formula, count_solutions, evaluate_formula
from .qstate import (
    GatherPlan,
    StateVector,
    all_biases,
    apply_clause_check,
    apply_pauli,
    check_theta,
    clause_projector,
    init_plus,
    measure_all,
    solution_state,
    subspace_fidelity,
    _PAULIS,
)

HALF_PI = math.pi / 2


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class FixedSchedule:
    theta: float
    c_q: int | None = None

    def __post_init__(self):
        check_theta(self.theta)


@dataclass(frozen=True)
class CubicSchedule:
    """theta(c) = theta_init + (pi/2 - theta_init) (c / c_Q)^3."""

    theta_init: float
    c_q: int

    def __post_init__(self):
        check_theta(self.theta_init)
        if self.c_q < 1:
            raise ConfigError("c_q must be >= 1")


@dataclass(frozen=True)
class LinearSchedule:
    theta_start: float
    theta_end: float
    c_q: int

    def __post_init__(self):
        check_theta(self.theta_start)
        check_theta(self.theta_end)
        if self.c_q < 1:
            raise ConfigError("c_q must be >= 1")


ThetaSchedule = FixedSchedule | CubicSchedule | LinearSchedule


def schedule_horizon(sched: ThetaSchedule, c_q: int | None = None) -> int:
    horizon = c_q if c_q is not None else getattr(sched, "c_q", None)
    if horizon is None:
        raise ConfigError("fixed schedule needs an explicit c_Q")
    if horizon < 0:
        raise ConfigError("c_Q must be >= 0")
    return int(horizon)


def theta_at(sched: ThetaSchedule, c: int, c_q: int | None = None) -> float:
    """Angle for schedule step c, 0 <= c <= c_Q; endpoints are exact."""
    horizon = schedule_horizon(sched, c_q)
    if not 0 <= c <= horizon:
        raise StructuralError(f"step {c} outside [0, {horizon}]")
    if isinstance(sched, FixedSchedule):
        return sched.theta
    if isinstance(sched, CubicSchedule):
        if c == horizon:
            return HALF_PI
        return sched.theta_init + (HALF_PI - sched.theta_init) * (c / horizon) ** 3
    if c == horizon:
        return sched.theta_end
    if c == 0:
        return sched.theta_start
    return sched.theta_start + (sched.theta_end - sched.theta_start) * (c / horizon)


# ---------------------------------------------------------------------------
# check order policies


@dataclass(frozen=True)
class SequentialOrder:
    """Formula order, every cycle."""


@dataclass(frozen=True)
class ShuffledOrder:
    """Fresh permutation per cycle, deterministic in seed."""

    seed: int = 0


@dataclass(frozen=True)
class IidOrder:
    """Each check draws a uniform clause index, deterministic in seed."""

    seed: int = 0


CheckOrderPolicy = SequentialOrder | ShuffledOrder | IidOrder


def realize_order(policy: CheckOrderPolicy, m: int, cycles: int) -> np.ndarray:
    """(cycles, m) int32 clause indices; the frozen check schedule.

    The same realized schedule is replayed on every restart attempt, which
    is what makes the renewal formula exact for all policies.
    """
    if isinstance(policy, SequentialOrder):
        return np.tile(np.arange(m, dtype=np.int32), (cycles, 1))
    rng = SplitMix64(policy.seed)
    if isinstance(policy, ShuffledOrder):
        out = np.empty((cycles, m), dtype=np.int32)
        perm = list(range(m))
        for c in range(cycles):
            rng.shuffle(perm)
            out[c] = perm
        return out
    out = np.empty((cycles, m), dtype=np.int32)
    for c in range(cycles):
        for j in range(m):
            out[c, j] = rng.next_below(m)
    return out


# ---------------------------------------------------------------------------
# deterministic post-selected trajectory


@dataclass
class Trajectory:
    """Exact record of the always-pass branch of one run."""

    n: int
    m: int
    cycles: int  # executed cycles = c_Q + 1
    thetas: np.ndarray  # angle per executed cycle
    order: np.ndarray  # (cycles, m) realized clause order
    pass_probs: np.ndarray  # flat q_t, one per executed check
    biases: np.ndarray  # (cycles + 1, n); row 0 = initial state
    fidelity_pre: np.ndarray | None  # subspace fidelity entering each cycle
    fidelity_post: np.ndarray | None  # and after it, both at that cycle's angle
    success_prob: float
    aborted: bool
    abort_info: tuple[int, int] | None  # (check index, clause index)
    final_state: StateVector | None
    solutions: tuple

    @property
    def total_checks(self) -> int:
        return self.cycles * self.m


def _resolve_solutions(f: Formula, solutions) -> tuple:
    if solutions is not None:
        return tuple(solutions)
    if f.n <= 30:
        _, sols = count_solutions(f)
        return tuple(sols)
    return ()


def build_plans(f: Formula) -> list[GatherPlan]:
    return [
        GatherPlan(f.n, tuple(l.var_index for l in c.literals)) for c in f.clauses
    ]


def run_deterministic(
    f: Formula,
    sched: ThetaSchedule,
    order: CheckOrderPolicy = SequentialOrder(),
    c_q: int | None = None,
    solutions=None,
    keep_final_state: bool = True,
    track_fidelity: bool = True,
    initial_state: StateVector | None = None,
) -> Trajectory:
    """Simulate the post-selected branch; exact, no sampling.

    Fidelity tracking needs the solution list; it is looked up by
    exhaustive counting when not supplied and skipped for unsatisfiable
    formulas. The register starts in the uniform superposition unless an
    explicit initial_state is given (it is copied, never mutated).
    """
    horizon = schedule_horizon(sched, c_q)
    cycles = horizon + 1
    sols = _resolve_solutions(f, solutions)
    track = track_fidelity and len(sols) > 0
    thetas = np.array([theta_at(sched, c, horizon) for c in range(cycles)])
    order_matrix = realize_order(order, f.m, cycles)
    plans = build_plans(f)

    if initial_state is not None:
        if initial_state.n != f.n:
            raise StructuralError(
                f"initial state on {initial_state.n} qubits, formula has {f.n}"
            )
        s = initial_state.copy()
    else:
        s = init_plus(f.n)
    q = np.ones(cycles * f.m, dtype=np.float64)
    biases = np.empty((cycles + 1, f.n), dtype=np.float64)
    biases[0] = all_biases(s)
    fid_pre = np.full(cycles, np.nan) if track else None
    fid_post = np.full(cycles, np.nan) if track else None

    aborted = False
    abort_info = None
    t = 0
    for c in range(cycles):
        theta = float(thetas[c])
        projs = [
            clause_projector(cl, theta, f.n, plans[i])
            for i, cl in enumerate(f.clauses)
        ]
        if track:
            fid_pre[c] = subspace_fidelity(s, sols, theta)
        for ci in order_matrix[c]:
            try:
                s, qt = apply_clause_check(
                    s, projs[ci], in_place=True, check_norm=False
                )
            except CertainFailureError:
                aborted = True
                abort_info = (t, int(ci))
                break
            q[t] = qt
            t += 1
        if aborted:
            break
        s.renormalize()
        biases[c + 1] = all_biases(s)
        if track:
            fid_post[c] = subspace_fidelity(s, sols, theta)

    if aborted:
        q = q[:t]
        biases = biases[: (t // f.m) + 1]
        success = 0.0
    else:
        success = float(np.prod(q))
    return Trajectory(
        n=f.n,
        m=f.m,
        cycles=cycles,
        thetas=thetas,
        order=order_matrix,
        pass_probs=q,
        biases=biases,
        fidelity_pre=fid_pre,
        fidelity_post=fid_post,
        success_prob=success,
        aborted=aborted,
        abort_info=abort_info,
        final_state=s if (keep_final_state and not aborted) else None,
        solutions=sols,
    )


# ---------------------------------------------------------------------------
# renewal-formula runtime


def renewal_expected_checks(q: np.ndarray, total_checks: int) -> float:
    """Expected total checks of the restart process with per-check pass
    probabilities q and attempt length total_checks.

    P_fail(t) = (prod_{s<t} q_s)(1 - q_t) for t = 1..T;
    E = [sum_t t P_fail(t) + T p] / p with p = prod q_t.
    """
    q = np.asarray(q, dtype=np.float64)
    if len(q) != total_checks:
        raise ContractError(f"{len(q)} pass probabilities for T={total_checks}")
    cp = np.cumprod(q)
    p = float(cp[-1]) if len(cp) else 1.0
    if p <= 0.0:
        raise InfiniteExpectationError("success probability is zero")
    before = np.concatenate(([1.0], cp[:-1]))
    p_fail = before * (1.0 - q)
    t = np.arange(1, total_checks + 1, dtype=np.float64)
    return float((np.dot(t, p_fail) + total_checks * p) / p)


def expected_checks(traj: Trajectory) -> float:
    if traj.aborted or traj.success_prob <= 0.0:
        raise InfiniteExpectationError("trajectory has zero success probability")
    return renewal_expected_checks(traj.pass_probs, traj.total_checks)


# ---------------------------------------------------------------------------
# c_smooth


def c_smooth_of(traj: Trajectory, a_star: np.ndarray) -> int | None:
    """Smallest completed-cycle count from which every qubit's bias stays
    at least 0.51 toward its value in a_star; None if never stable."""
    a = np.asarray(a_star, dtype=bool)
    toward = np.where(a[None, :], traj.biases, 1.0 - traj.biases)
    ok = (toward >= 0.51).all(axis=1)
    if not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    return int(bad[-1]) + 1 if len(bad) else 0


# ---------------------------------------------------------------------------
# Monte-Carlo cross-validation and noise


@dataclass(frozen=True)
class NoiseConfig:
    """Uniform depolarizing noise: before each cycle every qubit suffers a
    uniformly chosen Pauli X/Y/Z with probability p_error."""

    p_error: float

    def __post_init__(self):
        if not 0.0 <= self.p_error <= 1.0:
            raise ConfigError("p_error must be in [0, 1]")


@dataclass
class MonteCarloReport:
    runs: int
    successes: int
    exhausted: int  # runs that hit max_restarts
    mean_checks: float
    std_error: float
    mean_restarts: float
    checks: np.ndarray  # per successful run
    measured: list  # one sampled assignment per successful run
    satisfied: int  # how many sampled assignments satisfy the formula

    @property
    def success_rate(self) -> float:
        return self.successes / self.runs if self.runs else 0.0


def _sample_noise_free(
    traj: Trajectory, runs: int, max_restarts: int, rng: np.random.Generator
):
    """Sample the restart process against the deterministic q_t."""
    q = traj.pass_probs
    total = traj.total_checks
    checks = []
    restarts = []
    measured = []
    exhausted = 0
    for _ in range(runs):
        spent = 0
        attempts = 0
        done = False
        while attempts <= max_restarts:
            u = rng.random(total)
            fails = np.flatnonzero(u >= q)
            if len(fails) == 0:
                spent += total
                done = True
                break
            spent += int(fails[0]) + 1
            attempts += 1
        if done:
            checks.append(spent)
            restarts.append(attempts)
            measured.append(measure_all(traj.final_state, rng))
        else:
            exhausted += 1
    return checks, restarts, measured, exhausted


def _sample_noisy(
    f: Formula,
    thetas: np.ndarray,
    order_matrix: np.ndarray,
    plans,
    noise: NoiseConfig,
    runs: int,
    max_restarts: int,
    rng: np.random.Generator,
):
    """Step the full state per attempt, injecting Pauli errors per cycle."""
    cycles, m = order_matrix.shape
    checks = []
    restarts = []
    measured = []
    exhausted = 0
    for _ in range(runs):
        spent = 0
        attempts = 0
        done = False
        while attempts <= max_restarts:
            s = init_plus(f.n)
            failed = False
            for c in range(cycles):
                for qb in range(f.n):
                    if rng.random() < noise.p_error:
                        apply_pauli(s, qb, _PAULIS[rng.integers(3)])
                projs = [
                    clause_projector(cl, float(thetas[c]), f.n, plans[i])
                    for i, cl in enumerate(f.clauses)
                ]
                for ci in order_matrix[c]:
                    spent += 1
                    try:
                        s2, qt = apply_clause_check(
                            s, projs[ci], in_place=True, check_norm=False
                        )
                    except CertainFailureError:
                        failed = True
                        break
                    if rng.random() >= qt:
                        failed = True
                        break
                    s = s2
                if failed:
                    break
                s.renormalize()
            if failed:
                attempts += 1
                continue
            done = True
            break
        if done:
            checks.append(spent)
            restarts.append(attempts)
            measured.append(measure_all(s, rng))
        else:
            exhausted += 1
    return checks, restarts, measured, exhausted


def run_monte_carlo(
    f: Formula,
    sched: ThetaSchedule,
    order: CheckOrderPolicy = SequentialOrder(),
    c_q: int | None = None,
    seed: int = 0,
    max_restarts: int = 1_000_000,
    noise: NoiseConfig | None = None,
    runs: int = 1,
) -> MonteCarloReport:
    """Sampled counterpart of run_deterministic.

    Noise-free sampling draws pass/fail per check against the deterministic
    trajectory's q_t (the surviving branch is unique, so those are the
    exact per-check probabilities); with noise the full state is stepped.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    horizon = schedule_horizon(sched, c_q)
    if noise is None:
        traj = run_deterministic(
            f, sched, order, c_q=horizon, keep_final_state=True,
            track_fidelity=False,
        )
        if traj.aborted:
            checks, restarts, measured, exhausted = [], [], [], runs
        else:
            checks, restarts, measured, exhausted = _sample_noise_free(
                traj, runs, max_restarts, rng
            )
    else:
        cycles = horizon + 1
        thetas = np.array([theta_at(sched, c, horizon) for c in range(cycles)])
        order_matrix = realize_order(order, f.m, cycles)
        plans = build_plans(f)
        checks, restarts, measured, exhausted = _sample_noisy(
            f, thetas, order_matrix, plans, noise, runs, max_restarts, rng
        )
    arr = np.asarray(checks, dtype=np.float64)
    satisfied = sum(1 for a in measured if evaluate_formula(f, a))
    if arr.size:
        se = arr.std(ddof=1) / math.sqrt(arr.size) if arr.size > 1 else float("nan")
        mean = float(arr.mean())
        mean_restarts = float(np.mean(restarts))
    else:
        se, mean, mean_restarts = float("nan"), float("nan"), float("nan")
    return MonteCarloReport(
        runs=runs,
        successes=len(checks),
        exhausted=exhausted,
        mean_checks=mean,
        std_error=float(se),
        mean_restarts=mean_restarts,
        checks=arr,
        measured=measured,
        satisfied=satisfied,
    )


# ---------------------------------------------------------------------------
# noise abort-rate experiment


@dataclass(frozen=True)
class AbortStats:
    trials: int
    aborts: int

    @property
    def fraction(self) -> float:
        return self.aborts / self.trials

    @property
    def std_error(self) -> float:
        p = self.fraction
        return math.sqrt(p * (1 - p) / self.trials)


def noise_abort_experiment(
    f: Formula, a_star: np.ndarray, trials: int, seed: int = 0
) -> AbortStats:
    """Inject one uniform Pauli on a converged register at theta = pi/2 and
    run one check cycle; returns the fraction of injections that abort."""
    theta = HALF_PI
    plans = build_plans(f)
    base = solution_state(a_star, theta)
    rng = np.random.Generator(np.random.PCG64(seed))
    projs = [
        clause_projector(cl, theta, f.n, plans[i]) for i, cl in enumerate(f.clauses)
    ]
    aborts = 0
    for _ in range(trials):
        s = base.copy()
        apply_pauli(s, int(rng.integers(f.n)), _PAULIS[rng.integers(3)])
        for proj in projs:
            try:
                s, qt = apply_clause_check(s, proj, in_place=True, check_norm=False)
            except CertainFailureError:
                aborts += 1
                break
            if rng.random() >= qt:
                aborts += 1
                break
    return AbortStats(trials, aborts)


# ---------------------------------------------------------------------------
# majority vote and repetition analysis


def majority_vote_infer(
    f: Formula,
    theta: float,
    c_q: int,
    repetitions: int,
    seed: int = 0,
    solutions=None,
) -> tuple[np.ndarray, bool]:
    """Infer an assignment from per-qubit majority over R successful
    fixed-theta runs, each measured once in the z basis."""
    if repetitions < 1 or repetitions % 2 == 0:
        raise ConfigError("repetitions must be odd and >= 1")
    if not 0.0 < theta <= HALF_PI:
        raise ConfigError("need 0 < theta <= pi/2")
    traj = run_deterministic(
        f,
        FixedSchedule(theta),
        c_q=c_q,
        solutions=solutions,
        track_fidelity=False,
    )
    if traj.aborted:
        raise InfiniteExpectationError("run aborts with certainty; nothing to vote on")
    rng = np.random.Generator(np.random.PCG64(seed))
    votes = np.zeros(f.n, dtype=np.int64)
    for _ in range(repetitions):
        votes += measure_all(traj.final_state, rng)
    inferred = votes * 2 > repetitions
    return inferred, evaluate_formula(f, inferred)


def binomial_tail(r: int, p: float) -> float:
    """P[Binom(r, p) <= (r-1)/2]: chance a per-qubit majority vote errs."""
    k_max = (r - 1) // 2
    return float(
        sum(math.comb(r, k) * p**k * (1 - p) ** (r - k) for k in range(k_max + 1))
    )


@dataclass(frozen=True)
class RepetitionReport:
    gaussian_r: int
    binomial_r: int
    gaussian_valid: bool  # R(1-p) >= 5, the Gaussian validity threshold
    p: float
    target_tail: float


def _gaussian_criterion(r: int, theta: float, threshold: float) -> bool:
    g = math.sqrt(r / 2.0) * math.tan(theta)
    return g * math.exp(g * g) > threshold


def repetition_details(
    theta: float, n: int, confidence: float | None = None, r_cap: int = 10**7
) -> RepetitionReport:
    """Gaussian-criterion repetitions and the exact binomial cross-check.

    The default target per-qubit tail is 1/n (the criterion
    G exp(G^2) > n/(2 sqrt(pi)) with G = sqrt(R/2) tan(theta)); passing a
    confidence c tightens the tail to (1-c)/n.
    """
    if not 0.0 < theta < HALF_PI:
        raise ConfigError("need 0 < theta < pi/2")
    if confidence is None:
        tail = 1.0 / n
    else:
        if not 0.0 < confidence < 1.0:
            raise ConfigError("confidence must be in (0, 1)")
        tail = (1.0 - confidence) / n
    threshold = 1.0 / (2.0 * math.sqrt(math.pi) * tail)
    p = (1.0 + math.sin(theta)) / 2.0
    gaussian_r = None
    binomial_r = None
    r = 1
    while r <= r_cap and (gaussian_r is None or binomial_r is None):
        if gaussian_r is None and _gaussian_criterion(r, theta, threshold):
            gaussian_r = r
        if binomial_r is None and binomial_tail(r, p) < tail:
            binomial_r = r
        r += 2
    if gaussian_r is None or binomial_r is None:
        raise ConfigError(f"no R below cap {r_cap} meets the target tail")
    return RepetitionReport(
        gaussian_r=gaussian_r,
        binomial_r=binomial_r,
        gaussian_valid=gaussian_r * (1.0 - p) >= 5.0,
        p=p,
        target_tail=tail,
    )


def required_repetitions(theta: float, n: int, confidence: float | None = None) -> int:
    """Smallest odd R satisfying the Gaussian tail criterion."""
    return repetition_details(theta, n, confidence).gaussian_r


# ---------------------------------------------------------------------------
# slow-sweep experiment


@dataclass(frozen=True)
class SweepPoint:
    increments: int
    success_prob: float
    expected_checks: float
    fail_distribution: np.ndarray  # P_fail(t), t = 1..T
    total_checks: int


@dataclass(frozen=True)
class SweepReport:
    points: tuple
    success_monotone: bool
    best_increments: int  # argmin of expected checks
    interior_optimum: bool  # best is not the slowest sweep


def fail_distribution(traj: Trajectory) -> np.ndarray:
    q = traj.pass_probs
    cp = np.cumprod(q)
    before = np.concatenate(([1.0], cp[:-1]))
    return before * (1.0 - q)


def adiabatic_sweep_experiment(
    f: Formula,
    increments,
    order: CheckOrderPolicy = SequentialOrder(),
    theta_start: float = 0.0,
    solutions=None,
) -> SweepReport:
    """Linear sweeps from theta_start to pi/2, one per increment count."""
    points = []
    sols = _resolve_solutions(f, solutions)
    for inc in increments:
        sched = LinearSchedule(theta_start, HALF_PI, int(inc))
        traj = run_deterministic(
            f, sched, order, solutions=sols, keep_final_state=False,
            track_fidelity=False,
        )
        points.append(
            SweepPoint(
                increments=int(inc),
                success_prob=traj.success_prob,
                expected_checks=expected_checks(traj),
                fail_distribution=fail_distribution(traj),
                total_checks=traj.total_checks,
            )
        )
    ordered = sorted(points, key=lambda pt: pt.increments)
    succ = [pt.success_prob for pt in ordered]
    monotone = all(b >= a for a, b in zip(succ, succ[1:]))
    best = min(points, key=lambda pt: pt.expected_checks)
    return SweepReport(
        points=tuple(points),
        success_monotone=monotone,
        best_increments=best.increments,
        interior_optimum=best.increments != ordered[-1].increments,
    )
