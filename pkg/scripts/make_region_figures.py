#!/usr/bin/env python3
"""Emit the three flagship (p, q) region diagrams as CSV + SVG.

Covers the complete-picture operator class at N = 4, m = 2 for one
order below the dimension gap (alpha = 1), one exactly on it
(alpha = 2) and one above it (alpha = 3).

Usage: python scripts/make_region_figures.py [outdir] [--res 200]
"""

import argparse
import pathlib
import sys

from nonlocal_supersol.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", nargs="?", default="figures")
    parser.add_argument("--res", type=int, default=200)
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for alpha in ("1", "2", "3"):
        base = outdir / f"region_N4_m2_alpha{alpha}"
        code = cli_main([
            "region", "--N", "4", "--m", "2", "--alpha", alpha,
            "--p-range", "0", "5", "--q-range", "-1", "5",
            "--res", str(args.res), "--out", str(base),
        ])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
