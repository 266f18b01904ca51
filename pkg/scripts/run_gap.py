#!/usr/bin/env python3
"""Spectral gap vs analytic lower bound across instances and angles.

Writes results/gap/. Extra CLI flags pass through, e.g.:

    python3 scripts/run_gap.py --profile desk
    python3 scripts/run_gap.py --sizes 8 --count 3 --thetas 0.3,0.6,1.4
"""

import sys

from mdsat.cli import main

if __name__ == "__main__":
    sys.exit(main(["gap", "--out", "results/gap", *sys.argv[1:]]))
