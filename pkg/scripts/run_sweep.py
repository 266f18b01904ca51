#!/usr/bin/env python3
"""Linear-sweep slowness study: success probability and expected checks
as a function of sweep increments, one size at a time.

Writes results/sweep/. Extra CLI flags pass through; --n is required:

    python3 scripts/run_sweep.py --n 12
    python3 scripts/run_sweep.py --n 12 --count 5 --increments 1,2,4,8,16,32
"""

import sys

from mdsat.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--n" not in args:
        args = ["--n", "12", *args]
    sys.exit(main(["sweep", "--out", "results/sweep", *args]))
