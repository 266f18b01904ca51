"""Command-line interface.

Subcommands: generate, solve-classical, solve-quantum, trace, compare,
c-smooth, sweep, gap, run-plan. Global flags --seed, --out, --threads and
--profile apply to every subcommand.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .errors import MdsatError
from .generate import (
    DEFAULT_CLAUSE_RATIO,
    GenConfig,
    generate_suite,
    instance_metadata,
    load_instance,
    save_instance,
)
from .harness import (
    PROFILES,
    classical_report,
    load_plan,
    make_order,
    make_schedule,
    profile_c_smooth_plan,
    profile_compare_plan,
    profile_gap_plan,
    profile_sweep_plan,
    quantum_report,
    run_plan,
    trace_fieldnames,
    trace_rows,
    write_csv,
    write_json,
)
from .rng import derive_seed

HALF_PI = math.pi / 2


def _parse_schedule(text: str):
    """fixed:THETA,CQ | cubic:THETA_INIT,CQ | linear:START,END,CQ"""
    try:
        kind, _, rest = text.partition(":")
        parts = [p for p in rest.split(",") if p]
        if kind == "fixed":
            theta, c_q = float(parts[0]), int(parts[1])
            return make_schedule("fixed", theta, c_q)
        if kind == "cubic":
            theta, c_q = float(parts[0]), int(parts[1])
            return make_schedule("cubic", theta, c_q)
        if kind == "linear":
            a, b, c_q = float(parts[0]), float(parts[1]), int(parts[2])
            return make_schedule("linear", 0.0, c_q, theta_start=a, theta_end=b)
    except (IndexError, ValueError) as exc:
        raise argparse.ArgumentTypeError(
            f"bad schedule {text!r}; want fixed:THETA,CQ | cubic:THETA,CQ"
            f" | linear:START,END,CQ"
        ) from exc
    raise argparse.ArgumentTypeError(f"unknown schedule kind {kind!r}")


def _parse_n_s(text: str):
    if text.lower() in ("any", "none", "*"):
        return None
    return int(text)


def _parse_c_max(text: str, n: int):
    low = text.lower()
    if low in ("none", "inf", "infinite"):
        return None
    if low.endswith("n"):
        return int(low[:-1] or "1") * n
    return int(text)


def _int_list(text: str):
    return [int(p) for p in text.split(",") if p]


def _float_list(text: str):
    out = []
    for p in text.split(","):
        if not p:
            continue
        out.append(HALF_PI if p.strip() in ("pi/2", "pi2") else float(p))
    return out


def _emit(obj, out_dir, filename):
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        write_json(os.path.join(out_dir, filename), obj)


def _load_formula(path: str):
    formula, _ = load_instance(path)
    return formula


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="mdsat", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for plan execution")
    common.add_argument("--profile", choices=sorted(PROFILES), default="desk",
                        help="preset experiment scale")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common],
                       help="write random 3-SAT instances as DIMACS files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--n-s", type=_parse_n_s, default=None,
                   help="required solution count; 'any' disables filtering")
    p.add_argument("--ratio", type=float, default=DEFAULT_CLAUSE_RATIO)

    p = sub.add_parser("solve-classical", parents=[common],
                       help="random-walk solver statistics for one instance")
    p.add_argument("cnf")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--c-max", default="3n",
                   help="flip budget per restart: int, 'Kn', or 'none'")
    p.add_argument("--max-checks", type=int, default=None)

    p = sub.add_parser("solve-quantum", parents=[common],
                       help="deterministic measurement-driven run report")
    p.add_argument("cnf")
    p.add_argument("--schedule", type=_parse_schedule,
                   default=_parse_schedule("cubic:1.1,24"))
    p.add_argument("--order", choices=("sequential", "shuffled", "iid"),
                   default="sequential")

    p = sub.add_parser("trace", parents=[common],
                       help="per-cycle bias and pass-probability table")
    p.add_argument("cnf")
    p.add_argument("--schedule", type=_parse_schedule,
                   default=_parse_schedule("cubic:1.1,24"))
    p.add_argument("--order", choices=("sequential", "shuffled", "iid"),
                   default="sequential")

    p = sub.add_parser("compare", parents=[common],
                       help="classical versus quantum runtime study")
    p.add_argument("--sizes", type=_int_list, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--classical-runs", type=int, default=None)

    p = sub.add_parser("c-smooth", parents=[common],
                       help="bias settling cycle across angles and sizes")
    p.add_argument("--sizes", type=_int_list, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--thetas", type=_float_list, default=None)
    p.add_argument("--c-q", type=int, default=60)

    p = sub.add_parser("sweep", parents=[common],
                       help="linear sweep slowness study on one size")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--increments", type=_int_list, default=None)

    p = sub.add_parser("gap", parents=[common],
                       help="spectral gap and analytic bound across instances")
    p.add_argument("--sizes", type=_int_list, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--thetas", type=_float_list, default=None)

    p = sub.add_parser("run-plan", parents=[common],
                       help="execute a JSON experiment plan")
    p.add_argument("plan")
    return top


def _cmd_generate(args) -> int:
    out_dir = Path(args.out or "instances")
    out_dir.mkdir(parents=True, exist_ok=True)
    results, stats = generate_suite(args.n, args.count, target_n_s=args.n_s,
                                    seed=args.seed, clause_ratio=args.ratio)
    written = []
    for i, res in enumerate(results):
        cfg = GenConfig(n=args.n, clause_ratio=args.ratio,
                        target_n_s=args.n_s, seed=derive_seed(args.seed, i))
        base = out_dir / f"inst_n{args.n}_{i:04d}"
        cnf, _ = save_instance(base, res, instance_metadata(cfg, res))
        written.append(str(cnf))
    print(json.dumps({
        "written": written,
        "accepted": stats.accepted,
        "rejected": stats.rejected,
        "acceptance_rate": stats.acceptance_rate,
    }, indent=2, sort_keys=True))
    return 0


def _cmd_solve_classical(args) -> int:
    f = _load_formula(args.cnf)
    c_max = _parse_c_max(args.c_max, f.n)
    report = classical_report(f, args.runs, args.seed, c_max,
                              max_total_checks=args.max_checks)
    _emit(report, args.out, "classical.json")
    return 0


def _cmd_solve_quantum(args) -> int:
    f = _load_formula(args.cnf)
    order = make_order(args.order, args.seed)
    report = quantum_report(f, args.schedule, order)
    _emit(report, args.out, "quantum.json")
    return 0


def _cmd_trace(args) -> int:
    f = _load_formula(args.cnf)
    order = make_order(args.order, args.seed)
    rows = trace_rows(f, args.schedule, order)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "trace.csv")
    write_csv(path, trace_fieldnames(f.n), rows)
    print(path)
    return 0


def _run_profile_plan(args, plan) -> int:
    out_dir = args.out or plan["name"]
    manifest = run_plan(plan, out_dir, threads=args.threads)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def _cmd_compare(args) -> int:
    prof = PROFILES[args.profile]
    plan = profile_compare_plan(prof, seed=args.seed)
    for cell in plan["cells"]:
        if args.count is not None:
            cell["count"] = args.count
        if args.classical_runs is not None:
            cell["classical_runs"] = args.classical_runs
    if args.sizes is not None:
        tpl = dict(plan["cells"][0])
        plan["cells"] = [{**tpl, "n": n} for n in args.sizes]
    return _run_profile_plan(args, plan)


def _cmd_c_smooth(args) -> int:
    prof = PROFILES[args.profile]
    plan = profile_c_smooth_plan(prof, seed=args.seed, c_q=args.c_q)
    for cell in plan["cells"]:
        if args.count is not None:
            cell["count"] = args.count
        if args.thetas is not None:
            cell["thetas"] = args.thetas
    if args.sizes is not None:
        tpl = dict(plan["cells"][0])
        plan["cells"] = [{**tpl, "n": n} for n in args.sizes]
    return _run_profile_plan(args, plan)


def _cmd_sweep(args) -> int:
    prof = PROFILES[args.profile]
    plan = profile_sweep_plan(prof, n=args.n, count=args.count, seed=args.seed)
    if args.increments is not None:
        plan["cells"][0]["increments"] = args.increments
    return _run_profile_plan(args, plan)


def _cmd_gap(args) -> int:
    prof = PROFILES[args.profile]
    plan = profile_gap_plan(prof, seed=args.seed)
    for cell in plan["cells"]:
        if args.count is not None:
            cell["count"] = args.count
        if args.thetas is not None:
            cell["thetas"] = args.thetas
    if args.sizes is not None:
        tpl = dict(plan["cells"][0])
        plan["cells"] = [{**tpl, "n": n} for n in args.sizes]
    return _run_profile_plan(args, plan)


def _cmd_run_plan(args) -> int:
    plan = load_plan(args.plan)
    if args.seed:
        plan["seed"] = args.seed
    out_dir = args.out or plan.get("name", "plan_out")
    manifest = run_plan(plan, out_dir, threads=args.threads)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve-classical": _cmd_solve_classical,
    "solve-quantum": _cmd_solve_quantum,
    "trace": _cmd_trace,
    "compare": _cmd_compare,
    "c-smooth": _cmd_c_smooth,
    "sweep": _cmd_sweep,
    "gap": _cmd_gap,
    "run-plan": _cmd_run_plan,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except MdsatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
