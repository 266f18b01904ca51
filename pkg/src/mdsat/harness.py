"""Batch experiment harness: reproducible multi-instance studies with CSV
and JSON outputs.

Reproducibility contract: every cell of a plan draws its seed from the
plan seed and the cell's index, rows are emitted in cell order regardless
of how many workers ran them, floats are written with shortest-roundtrip
repr, and manifests carry content hashes but no timestamps. Rerunning a
plan with any --threads value must produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InfiniteExpectationError
from .generate import generate_suite
from .rng import RNG_ID, derive_seed
from .sat import Formula
from .schoening import schoening_stats
from .solver import (
    CubicSchedule,
    FixedSchedule,
    LinearSchedule,
    SequentialOrder,
    ShuffledOrder,
    IidOrder,
    adiabatic_sweep_experiment,
    c_smooth_of,
    expected_checks,
    run_deterministic,
)
from .spectral import eigencount_below, gap_lower_bound, spectral_gap

HALF_PI = math.pi / 2


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class Profile:
    """Preset scales. desk finishes on a laptop; paper mirrors the large
    study and only fits sizes the state-vector engine can hold."""

    name: str
    compare_sizes: tuple
    instances_per_size: int
    classical_runs: int
    c_smooth_sizes: tuple
    c_smooth_instances: int
    c_smooth_thetas: tuple
    sweep_increments: tuple
    gap_sizes: tuple
    gap_instances: int
    gap_thetas: tuple


PROFILES = {
    "desk": Profile(
        name="desk",
        compare_sizes=(12, 14, 16, 18),
        instances_per_size=50,
        classical_runs=300,
        c_smooth_sizes=(8, 10, 12),
        c_smooth_instances=20,
        c_smooth_thetas=(0.3, 0.5, 0.7, 0.9, 1.1, 1.3, HALF_PI),
        sweep_increments=(1, 2, 4, 8, 16, 32),
        gap_sizes=(8, 10),
        gap_instances=10,
        gap_thetas=(0.3, 0.6, 1.4),
    ),
    "paper": Profile(
        name="paper",
        compare_sizes=(20, 22, 24, 26),
        instances_per_size=512,
        classical_runs=1000,
        c_smooth_sizes=(16, 20, 24),
        c_smooth_instances=100,
        c_smooth_thetas=(0.3, 0.5, 0.7, 0.9, 1.1, 1.3, HALF_PI),
        sweep_increments=(1, 2, 4, 8, 16, 32, 64),
        gap_sizes=(10, 12),
        gap_instances=50,
        gap_thetas=(0.3, 0.6, 1.4),
    ),
}


def default_theta_init(n: int) -> float:
    """Schedule start angle, drifting lower as instances grow."""
    frac = 0.7 + 0.016 * (20 - n)
    return min(max(frac, 0.05), 0.95) * HALF_PI


DEFAULT_C_Q = 24


def default_c_max(n: int) -> int:
    return 3 * n


# ---------------------------------------------------------------------------
# deterministic CSV / JSON output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: str, fieldnames, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fieldnames)
        for row in rows:
            w.writerow([_fmt(row.get(k)) for k in fieldnames])


def write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# schedule construction shared with the CLI


def make_schedule(kind: str, theta_init: float, c_q: int,
                  theta_start: float = 0.0, theta_end: float = HALF_PI):
    if kind == "fixed":
        return FixedSchedule(theta_init, c_q)
    if kind == "cubic":
        return CubicSchedule(theta_init, c_q)
    if kind == "linear":
        return LinearSchedule(theta_start, theta_end, c_q)
    raise ConfigError(f"unknown schedule kind {kind!r}")


def make_order(kind: str, seed: int = 0):
    if kind == "sequential":
        return SequentialOrder()
    if kind == "shuffled":
        return ShuffledOrder(seed)
    if kind == "iid":
        return IidOrder(seed)
    raise ConfigError(f"unknown order policy {kind!r}")


# ---------------------------------------------------------------------------
# single-run report (solve-quantum)


def quantum_report(f: Formula, sched, order=SequentialOrder(),
                   c_q: int | None = None, top: int = 4) -> dict:
    traj = run_deterministic(f, sched, order, c_q=c_q)
    try:
        exp = expected_checks(traj)
    except InfiniteExpectationError:
        exp = None
    report = {
        "n": f.n,
        "m": f.m,
        "n_s": len(traj.solutions),
        "cycles": traj.cycles,
        "total_checks": traj.total_checks,
        "success_prob": traj.success_prob,
        "expected_checks": exp,
        "aborted": traj.aborted,
        "schedule": type(sched).__name__,
        "order": type(order).__name__,
        "rng": RNG_ID,
    }
    if traj.aborted:
        report["abort_check"], report["abort_clause"] = traj.abort_info
        return report
    if len(traj.solutions) == 1:
        report["c_smooth"] = c_smooth_of(traj, traj.solutions[0])
    probs = np.abs(traj.final_state.amps) ** 2
    k = min(top, len(probs))
    top_idx = np.argsort(probs)[::-1][:k]
    report["top_outcomes"] = [
        {"bits": format(int(i), f"0{f.n}b")[::-1], "prob": float(probs[i])}
        for i in top_idx
    ]
    report["final_biases"] = [float(b) for b in traj.biases[-1]]
    if traj.fidelity_post is not None:
        report["final_fidelity"] = float(traj.fidelity_post[-1])
    return report


def classical_report(f: Formula, runs: int, seed: int, c_max: int | None,
                     max_total_checks: int | None = None) -> dict:
    stats = schoening_stats(f, runs, seed=seed, c_max=c_max,
                            max_total_checks=max_total_checks)
    return {
        "n": f.n,
        "m": f.m,
        "runs": stats.runs,
        "timeouts": stats.timeouts,
        "mean_checks": stats.mean,
        "variance_checks": stats.variance,
        "std_error": stats.std_error,
        "quantiles": stats.quantiles,
        "c_max": c_max,
        "rng": RNG_ID,
    }


# ---------------------------------------------------------------------------
# trace experiment


def trace_rows(f: Formula, sched, order=SequentialOrder(),
               c_q: int | None = None) -> list[dict]:
    """Per-cycle trajectory table. Row 0 is the initial state; row k
    reflects the state after k completed cycles."""
    traj = run_deterministic(f, sched, order, c_q=c_q, keep_final_state=False)
    rows = []
    base = {f"bias_{i}": float(traj.biases[0][i]) for i in range(f.n)}
    rows.append({"cycle": 0, "theta": None, "cycle_pass_prob": None,
                 "cumulative_success": 1.0, "fidelity_pre": None,
                 "fidelity_post": None, **base})
    cum = 1.0
    full = traj.pass_probs.reshape(-1, f.m) if not traj.aborted else None
    for c in range(traj.cycles):
        if traj.aborted and c >= traj.biases.shape[0] - 1:
            break
        qprod = float(np.prod(full[c])) if full is not None else None
        if qprod is not None:
            cum *= qprod
        row = {
            "cycle": c + 1,
            "theta": float(traj.thetas[c]),
            "cycle_pass_prob": qprod,
            "cumulative_success": cum if qprod is not None else 0.0,
            "fidelity_pre": None if traj.fidelity_pre is None
            else float(traj.fidelity_pre[c]),
            "fidelity_post": None if traj.fidelity_post is None
            else float(traj.fidelity_post[c]),
        }
        row.update({f"bias_{i}": float(traj.biases[c + 1][i]) for i in range(f.n)})
        rows.append(row)
    return rows


def trace_fieldnames(n: int) -> list[str]:
    return ["cycle", "theta", "cycle_pass_prob", "cumulative_success",
            "fidelity_pre", "fidelity_post"] + [f"bias_{i}" for i in range(n)]


# ---------------------------------------------------------------------------
# compare experiment (classical versus quantum runtimes across sizes)

COMPARE_FIELDS = ["n", "instance", "seed", "m", "n_s", "classical_mean",
                  "classical_var", "classical_timeouts", "quantum_expected",
                  "quantum_success_prob", "theta_init", "c_q"]

COMPARE_SUMMARY_FIELDS = ["n", "instances", "classical_mean", "classical_var",
                          "quantum_mean", "quantum_var", "variance_ratio",
                          "rank_correlation"]


def compare_cell(n: int, count: int, classical_runs: int, seed: int,
                 c_q: int | None = None, theta_init: float | None = None,
                 c_max: int | None = None, target_n_s: int = 1,
                 clause_ratio: float | None = None) -> list[dict]:
    """One size of the classical-versus-quantum study."""
    kwargs = {"target_n_s": target_n_s}
    if clause_ratio is not None:
        kwargs["clause_ratio"] = clause_ratio
    results, _ = generate_suite(n, count, seed=seed, **kwargs)
    cq = DEFAULT_C_Q if c_q is None else c_q
    ti = default_theta_init(n) if theta_init is None else theta_init
    cm = default_c_max(n) if c_max is None else c_max
    sched = CubicSchedule(ti, cq)
    rows = []
    for i, res in enumerate(results):
        f = res.formula
        inst_seed = derive_seed(seed, 100_000 + i)
        stats = schoening_stats(f, classical_runs, seed=inst_seed, c_max=cm)
        traj = run_deterministic(f, sched, keep_final_state=False,
                                 track_fidelity=False,
                                 solutions=res.solutions)
        try:
            qexp = expected_checks(traj)
        except InfiniteExpectationError:
            qexp = None
        rows.append({
            "n": n, "instance": i, "seed": inst_seed, "m": f.m,
            "n_s": res.n_s,
            "classical_mean": stats.mean,
            "classical_var": stats.variance,
            "classical_timeouts": stats.timeouts,
            "quantum_expected": qexp,
            "quantum_success_prob": traj.success_prob,
            "theta_init": ti, "c_q": cq,
        })
    return rows


def summarize_compare(rows: list[dict]) -> tuple[list[dict], float]:
    """Per-size across-instance statistics and the classical growth fit.

    The variance columns are across-instance variances of per-instance
    expected runtimes (sample variance, ddof 1); rank_correlation is the
    Spearman correlation between classical and quantum per-instance
    runtimes (does classical hardness predict quantum hardness); the fit
    base is exp(slope) of a least-squares line through (n, ln mean
    classical). Instances without a finite quantum expectation are
    excluded from the quantum columns.
    """
    from scipy.stats import spearmanr

    by_n: dict[int, list[dict]] = {}
    for r in rows:
        by_n.setdefault(r["n"], []).append(r)
    out = []
    ns, log_means = [], []
    for n in sorted(by_n):
        grp = by_n[n]
        cl = np.array([r["classical_mean"] for r in grp], dtype=np.float64)
        paired = [(r["classical_mean"], r["quantum_expected"]) for r in grp
                  if r["quantum_expected"] is not None]
        qu = np.array([q for _, q in paired], dtype=np.float64)
        cvar = float(cl.var(ddof=1)) if len(cl) > 1 else 0.0
        qvar = float(qu.var(ddof=1)) if len(qu) > 1 else 0.0
        if len(paired) > 2:
            rho = float(spearmanr([c for c, _ in paired],
                                  [q for _, q in paired]).statistic)
        else:
            rho = None
        out.append({
            "n": n, "instances": len(grp),
            "classical_mean": float(cl.mean()),
            "classical_var": cvar,
            "quantum_mean": float(qu.mean()) if len(qu) else None,
            "quantum_var": qvar,
            "variance_ratio": qvar / cvar if cvar > 0 else None,
            "rank_correlation": rho,
        })
        ns.append(n)
        log_means.append(math.log(cl.mean()))
    if len(ns) >= 2:
        slope = np.polyfit(np.array(ns, dtype=float), np.array(log_means), 1)[0]
        base = float(math.exp(slope))
    else:
        base = float("nan")
    return out, base


# ---------------------------------------------------------------------------
# c_smooth experiment

C_SMOOTH_FIELDS = ["n", "instance", "theta", "c_smooth", "converged"]
C_SMOOTH_SUMMARY_FIELDS = ["n", "theta", "instances", "converged",
                           "mean_c_smooth", "standardized"]


def c_smooth_cell(n: int, count: int, thetas, c_q: int, seed: int) -> list[dict]:
    """Fixed-angle runs on uniquely satisfiable instances: when does every
    bias settle on the solution."""
    results, _ = generate_suite(n, count, target_n_s=1, seed=seed)
    rows = []
    for i, res in enumerate(results):
        f = res.formula
        a_star = res.solutions[0]
        for theta in thetas:
            traj = run_deterministic(
                f, FixedSchedule(float(theta)), c_q=c_q,
                keep_final_state=False, track_fidelity=False,
                solutions=res.solutions,
            )
            cs = None if traj.aborted else c_smooth_of(traj, a_star)
            rows.append({
                "n": n, "instance": i, "theta": float(theta),
                "c_smooth": cs, "converged": cs is not None,
            })
    return rows


def summarize_c_smooth(rows: list[dict]) -> tuple[list[dict], dict]:
    """Mean settling cycle per (n, theta) plus a per-size standardized
    curve so shapes can be compared across sizes.

    Returns (summary rows, metadata); the metadata records the per-size
    shift and scale constants behind the standardized column.
    """
    by_key: dict[tuple, list] = {}
    for r in rows:
        by_key.setdefault((r["n"], r["theta"]), []).append(r)
    means: dict[tuple, float | None] = {}
    meta: dict[tuple, tuple] = {}
    for key, grp in sorted(by_key.items()):
        vals = [r["c_smooth"] for r in grp if r["c_smooth"] is not None]
        means[key] = float(np.mean(vals)) if vals else None
        meta[key] = (len(grp), len(vals))
    by_n: dict[int, list] = {}
    for (n, theta), mu in means.items():
        if mu is not None:
            by_n.setdefault(n, []).append(mu)
    scale = {}
    for n, vals in by_n.items():
        arr = np.array(vals)
        sd = float(arr.std(ddof=0))
        scale[n] = (float(arr.mean()), sd if sd > 0 else 1.0)
    out = []
    for (n, theta) in sorted(means):
        mu = means[(n, theta)]
        total, conv = meta[(n, theta)]
        z = None
        if mu is not None and n in scale:
            mean_n, sd_n = scale[n]
            z = (mu - mean_n) / sd_n
        out.append({"n": n, "theta": theta, "instances": total,
                    "converged": conv, "mean_c_smooth": mu,
                    "standardized": z})
    scale_meta = {
        str(n): {"shift": shift, "scale": sd}
        for n, (shift, sd) in sorted(scale.items())
    }
    return out, scale_meta


# ---------------------------------------------------------------------------
# sweep experiment

SWEEP_FIELDS = ["n", "instance", "increments", "success_prob",
                "expected_checks", "total_checks"]


def sweep_cell(n: int, count: int, increments, seed: int,
               target_n_s: int = 1) -> list[dict]:
    results, _ = generate_suite(n, count, target_n_s=target_n_s, seed=seed)
    rows = []
    for i, res in enumerate(results):
        report = adiabatic_sweep_experiment(res.formula, increments,
                                            solutions=res.solutions)
        for pt in report.points:
            rows.append({
                "n": n, "instance": i, "increments": pt.increments,
                "success_prob": pt.success_prob,
                "expected_checks": pt.expected_checks,
                "total_checks": pt.total_checks,
            })
    return rows


# ---------------------------------------------------------------------------
# gap experiment

GAP_FIELDS = ["n", "instance", "theta", "m", "n_s", "ground_dim",
              "gap", "bound", "ratio", "bound_holds"]


def gap_cell(n: int, count: int, thetas, seed: int,
             target_n_s=None) -> list[dict]:
    """Ground-space dimension, exact gap, the analytic lower bound, and
    its looseness ratio per (instance, theta)."""
    results, _ = generate_suite(n, count, target_n_s=target_n_s, seed=seed)
    rows = []
    for i, res in enumerate(results):
        f = res.formula
        for theta in thetas:
            theta = float(theta)
            summary = spectral_gap(f, theta, solutions=list(res.solutions))
            bound = gap_lower_bound(f.n, f.m, theta)
            rows.append({
                "n": n, "instance": i, "theta": theta, "m": f.m,
                "n_s": res.n_s, "ground_dim": summary.ground_dim,
                "gap": summary.gap, "bound": bound,
                "ratio": summary.gap / bound if bound > 0 else None,
                "bound_holds": bound <= summary.gap,
            })
    return rows


# ---------------------------------------------------------------------------
# plan runner

_CELL_FUNCTIONS = {
    "compare": (compare_cell, COMPARE_FIELDS),
    "c-smooth": (c_smooth_cell, C_SMOOTH_FIELDS),
    "sweep": (sweep_cell, SWEEP_FIELDS),
    "gap": (gap_cell, GAP_FIELDS),
}

def _summarize_compare_plan(rows):
    summary, base = summarize_compare(rows)
    return summary, {"classical_fit_base": base}


def _summarize_c_smooth_plan(rows):
    summary, scale = summarize_c_smooth(rows)
    return summary, {"standardization": scale}


_SUMMARIES = {
    "compare": (_summarize_compare_plan, COMPARE_SUMMARY_FIELDS),
    "c-smooth": (_summarize_c_smooth_plan, C_SMOOTH_SUMMARY_FIELDS),
}


def _run_cell(args):
    """One plan cell; failures are captured, not propagated, so a bad
    cell cannot take down the rest of the plan."""
    experiment, index, cell, seed = args
    fn, _ = _CELL_FUNCTIONS[experiment]
    try:
        return index, fn(seed=seed, **cell), None
    except Exception as exc:
        return index, [], f"{type(exc).__name__}: {exc}"


def load_plan(path: str) -> dict:
    with open(path) as fh:
        plan = json.load(fh)
    if "experiment" not in plan or "cells" not in plan:
        raise ConfigError("plan needs 'experiment' and 'cells'")
    if plan["experiment"] not in _CELL_FUNCTIONS:
        raise ConfigError(f"unknown experiment {plan['experiment']!r}")
    if not isinstance(plan["cells"], list) or not plan["cells"]:
        raise ConfigError("'cells' must be a non-empty list")
    return plan


def run_plan(plan: dict, out_dir: str, threads: int = 1) -> dict:
    """Execute every cell, merge rows in cell order, write CSV plus a
    manifest with content hashes. Output bytes are independent of the
    worker count."""
    experiment = plan["experiment"]
    name = plan.get("name", experiment)
    base_seed = int(plan.get("seed", 0))
    _, fields = _CELL_FUNCTIONS[experiment]
    cells = plan["cells"]
    jobs = [
        (experiment, i, dict(cell), derive_seed(base_seed, i))
        for i, cell in enumerate(cells)
    ]
    if threads <= 1:
        results = [_run_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell, jobs))
    results.sort(key=lambda item: item[0])
    rows = []
    failed = []
    for index, cell_rows, error in results:
        if error is not None:
            failed.append({"cell": index, "error": error})
        for r in cell_rows:
            rows.append({"cell": index, **r})
    os.makedirs(out_dir, exist_ok=True)
    files = {}
    main_csv = f"{name}.csv"
    write_csv(os.path.join(out_dir, main_csv), ["cell"] + fields, rows)
    files[main_csv] = sha256_file(os.path.join(out_dir, main_csv))
    metadata = {}
    if experiment in _SUMMARIES and rows:
        summarize, sum_fields = _SUMMARIES[experiment]
        summary_rows, metadata = summarize(rows)
        sum_csv = f"{name}_summary.csv"
        write_csv(os.path.join(out_dir, sum_csv), sum_fields, summary_rows)
        files[sum_csv] = sha256_file(os.path.join(out_dir, sum_csv))
    manifest = {
        "name": name,
        "experiment": experiment,
        "seed": base_seed,
        "cells": len(cells),
        "failed_cells": failed,
        "rng": RNG_ID,
        "format_version": 1,
        "metadata": metadata,
        "files": files,
    }
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def profile_compare_plan(profile: Profile, seed: int = 0) -> dict:
    cells = [
        {"n": n, "count": profile.instances_per_size,
         "classical_runs": profile.classical_runs}
        for n in profile.compare_sizes
    ]
    return {"name": f"compare_{profile.name}", "experiment": "compare",
            "seed": seed, "cells": cells}


def profile_c_smooth_plan(profile: Profile, seed: int = 0,
                          c_q: int = 60) -> dict:
    cells = [
        {"n": n, "count": profile.c_smooth_instances,
         "thetas": list(profile.c_smooth_thetas), "c_q": c_q}
        for n in profile.c_smooth_sizes
    ]
    return {"name": f"c_smooth_{profile.name}", "experiment": "c-smooth",
            "seed": seed, "cells": cells}


def profile_sweep_plan(profile: Profile, n: int, count: int,
                       seed: int = 0) -> dict:
    return {"name": f"sweep_{profile.name}", "experiment": "sweep",
            "seed": seed,
            "cells": [{"n": n, "count": count,
                       "increments": list(profile.sweep_increments)}]}


def profile_gap_plan(profile: Profile, seed: int = 0) -> dict:
    cells = [
        {"n": n, "count": profile.gap_instances,
         "thetas": list(profile.gap_thetas)}
        for n in profile.gap_sizes
    ]
    return {"name": f"gap_{profile.name}", "experiment": "gap",
            "seed": seed, "cells": cells}


def schedule_grid_search(f: Formula, theta_inits, c_qs,
                         solutions=None) -> list[dict]:
    """Expected checks over a (theta_init, c_Q) grid of gradual schedules,
    sorted best first. There is no canonical tabulation of good settings;
    search instead of guessing."""
    rows = []
    for ti in theta_inits:
        for cq in c_qs:
            traj = run_deterministic(
                f, CubicSchedule(float(ti), int(cq)),
                keep_final_state=False, track_fidelity=False,
                solutions=solutions,
            )
            try:
                exp = expected_checks(traj)
            except InfiniteExpectationError:
                exp = None
            rows.append({"theta_init": float(ti), "c_q": int(cq),
                         "success_prob": traj.success_prob,
                         "expected_checks": exp})
    return sorted(rows, key=lambda r: (r["expected_checks"] is None,
                                       r["expected_checks"]))
