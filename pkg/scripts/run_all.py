#!/usr/bin/env python3
"""Run every experiment at the active profile, sequentially.

    python3 scripts/run_all.py [--profile desk|paper] [--threads K] [--seed S]

Shared flags are forwarded to each experiment; sweep runs at the profile's
first comparison size. Results land under results/<experiment>/.
"""

import sys

from mdsat.cli import main
from mdsat.harness import PROFILES


def run(argv=None) -> int:
    shared = list(sys.argv[1:] if argv is None else argv)
    profile = "desk"
    if "--profile" in shared:
        profile = shared[shared.index("--profile") + 1]
    sweep_n = str(PROFILES[profile].compare_sizes[0])
    jobs = [
        ["compare", "--out", "results/compare"],
        ["c-smooth", "--out", "results/c_smooth"],
        ["sweep", "--n", sweep_n, "--out", "results/sweep"],
        ["gap", "--out", "results/gap"],
    ]
    for job in jobs:
        print(f"==> {job[0]}", file=sys.stderr)
        rc = main(job + shared)
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(run())
