#!/usr/bin/env python3
"""Render figures for every completed run found under a directory tree.

For each directory containing snapshot_final.csv this writes director.png
and magnetization.png next to it, plus energy_series.png (from energy.csv)
and convergence.png (from iterations.csv) when those series exist.

Usage:
    python3 scripts/render_gallery.py [--root out] [--stride 2]
"""

import argparse
import os
import sys

from plotview import PlotSpec, render


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default="out")
    parser.add_argument("--stride", type=int, default=2)
    args = parser.parse_args()

    jobs = 0
    for dirpath, _, filenames in sorted(os.walk(args.root)):
        if "snapshot_final.csv" not in filenames:
            continue
        snap = os.path.join(dirpath, "snapshot_final.csv")
        targets = [("director", snap), ("magnetization", snap)]
        if "energy.csv" in filenames:
            targets.append(("energy_series", os.path.join(dirpath, "energy.csv")))
        if "iterations.csv" in filenames:
            targets.append(("convergence", os.path.join(dirpath, "iterations.csv")))
        for mode, src in targets:
            out = os.path.join(dirpath, f"{mode}.png")
            render(PlotSpec(snapshot=src, mode=mode, out=out, stride=args.stride))
            print(out)
            jobs += 1
    if jobs == 0:
        print(f"no runs found under {args.root!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
