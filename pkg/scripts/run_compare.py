#!/usr/bin/env python3
"""Classical vs quantum runtime comparison at the active profile's sizes.

Writes results/compare/{compare_<profile>.csv, compare_<profile>_summary.csv,
manifest.json}. Extra CLI flags pass through, e.g.:

    python3 scripts/run_compare.py --profile desk --threads 4 --seed 1
    python3 scripts/run_compare.py --sizes 8,10 --count 5 --classical-runs 50
"""

import sys

from mdsat.cli import main

if __name__ == "__main__":
    sys.exit(main(["compare", "--out", "results/compare", *sys.argv[1:]]))
