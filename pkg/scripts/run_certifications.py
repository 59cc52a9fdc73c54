#!/usr/bin/env python3
"""Run the flagship certification set and write certificates + margin CSVs.

Whole-space constructions (critical-order, generic power-decay and
log-corrected), both bounded-domain amplitude regimes and one coupled
system.  Pass --fast for coarse grids.

Usage: python scripts/run_certifications.py [outdir] [--fast]
"""

import argparse
import pathlib
import sys

from nonlocal_supersol.cli import main as cli_main

RUNS = [
    ("critical_order", ["--theorem", "2.3i", "--N", "4", "--m", "2",
                        "--alpha", "2", "--p", "5", "--q", "1"]),
    ("power_decay", ["--theorem", "2.3ii", "--N", "5", "--m", "2",
                     "--alpha", "1", "--p", "2", "--q", "1"]),
    ("log_corrected", ["--theorem", "2.4", "--N", "4", "--m", "2",
                       "--alpha", "1", "--p", "2", "--q", "1"]),
    ("bounded_shrink", ["--theorem", "2.7", "--N", "2", "--m", "2",
                        "--R", "1", "--p", "1", "--q", "1"]),
    ("bounded_grow", ["--theorem", "2.9", "--N", "2", "--m", "2",
                      "--R", "1", "--p", "0.25", "--q", "0.25"]),
    ("system_shape1", ["--theorem", "2.12i", "--N", "5", "--m", "2", "--m2", "2",
                       "--alpha", "1", "--beta", "1", "--p", "1.5", "--q", "1.5",
                       "--r", "1.5", "--s", "1.5"]),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", nargs="?", default="certificates")
    parser.add_argument("--fast", action="store_true", help="coarse grids")
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name, flags in RUNS:
        argv = ["certify", *flags, "--out", str(outdir / name)]
        if args.fast:
            argv += ["--grid-points", "80", "--rel-tol", "1e-7"]
        print(f"== {name}")
        code = cli_main(argv)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
