#!/usr/bin/env python3
"""Nested grid/time self-convergence studies; prints the order tables.

Runs the smooth verification scenario twice — once with reaction terms
dropped (pure diffusion) and once with the full model — and reports the
estimated spatial and temporal orders together with the raw errors.

Usage:
    python3 scripts/convergence_tables.py [--output-dir out/convergence]
"""

import argparse
import json
import os
import sys

from ferro2d import parse_config
from ferro2d.analysis import convergence_study

LINEAR = """
model.l1_prime = 0.5
model.l2 = 0.5
model.c1 = 0.0
model.c2 = 0.0
model.c3 = 0.0
model.xi = 1.0
model.eta1 = 1.0
model.eta2 = 1.0
grid.n = 51
solver.delta_t = 1e-5
solver.max_time = 0.01
solver.linear_mode = true
scenario.kind = smooth
"""

FULL = """
model.l1_prime = 0.01
model.l2 = 0.01
model.c1 = 2.0
model.c2 = 8.0
model.c3 = 2.0
model.xi = 1.0
model.eta1 = 1.0
model.eta2 = 1.0
grid.n = 51
solver.delta_t = 1e-5
solver.max_time = 0.005
scenario.kind = smooth
"""


def table(label, report):
    lines = [f"{label}:"]
    lines.append("  delta_x      error")
    for dx, err in report.grid_errors:
        lines.append(f"  {dx:<10g} {err:.6e}")
    lines.append(f"  estimated spatial order  {report.estimated_spatial_order:.4f}")
    lines.append("  delta_t      error")
    for dt, err in report.time_errors:
        lines.append(f"  {dt:<10g} {err:.6e}")
    lines.append(f"  estimated temporal order {report.estimated_temporal_order:.4f}")
    return "\n".join(lines)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="out/convergence")
    args = parser.parse_args()
    os.makedirs(args.output_dir, exist_ok=True)
    for label, text in (("linear", LINEAR), ("full", FULL)):
        report = convergence_study(parse_config(text))
        print(table(label, report))
        payload = {
            "grid_errors": [list(p) for p in report.grid_errors],
            "time_errors": [list(p) for p in report.time_errors],
            "estimated_spatial_order": report.estimated_spatial_order,
            "estimated_temporal_order": report.estimated_temporal_order,
        }
        path = os.path.join(args.output_dir, f"convergence_{label}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"  -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
