#!/usr/bin/env python3
"""Bias settling-cycle study across sizes and angles.

Writes results/c_smooth/{c_smooth_<profile>.csv, *_summary.csv,
manifest.json}. Extra CLI flags pass through, e.g.:

    python3 scripts/run_c_smooth.py --profile desk --threads 4
    python3 scripts/run_c_smooth.py --sizes 8 --count 3 --thetas 0.9,1.3
"""

import sys

from mdsat.cli import main

if __name__ == "__main__":
    sys.exit(main(["c-smooth", "--out", "results/c_smooth", *sys.argv[1:]]))
