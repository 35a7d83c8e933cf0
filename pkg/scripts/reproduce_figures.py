#!/usr/bin/env python3
"""Run built-in presets (all of them by default) and write their artifacts.

Usage:
    python3 scripts/reproduce_figures.py [preset-id ...] [--output-dir out]

Each preset variant writes config.txt, snapshots, energy.csv, iterations.csv,
and summary.json under <output-dir>/<preset>/<variant>/.
"""

import argparse
import sys

from ferro2d.cli import main as ferro2d_main
from ferro2d.presets import preset_ids


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("figures", nargs="*", help="preset ids (default: all)")
    parser.add_argument("--output-dir", default="out")
    args = parser.parse_args()
    for fid in args.figures or preset_ids():
        code = ferro2d_main(["reproduce", fid, "--output-dir", args.output_dir])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
