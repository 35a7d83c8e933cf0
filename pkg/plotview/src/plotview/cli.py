"""Command-line entry point: PlotSpec fields as flags.

    plotview --mode director --snapshot out/snapshot_final.csv --out d.png
    plotview --mode convergence --snapshot a/iterations.csv \
             --snapshot b/iterations.csv --out stopping.png

Exit codes: 0 success, 1 bad arguments or unusable input.
"""

from __future__ import annotations

import argparse
import sys

from .plots import MODES, PlotInputError, PlotSpec, render

__all__ = ["main"]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotview",
        description="Render solver artifacts (snapshots, energy and iteration "
        "series) to image files, headlessly.",
    )
    parser.add_argument("--mode", required=True, choices=MODES)
    parser.add_argument(
        "--snapshot",
        required=True,
        action="append",
        help="input artifact; repeat for multiple convergence curves",
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--stride", type=int, default=2, help="glyph downsampling (>= 1)")
    parser.add_argument("--vmin", type=float, default=None, help="explicit color-range low")
    parser.add_argument("--vmax", type=float, default=None, help="explicit color-range high")
    args = parser.parse_args(argv)

    try:
        spec = PlotSpec(
            snapshot=args.snapshot[0],
            mode=args.mode,
            out=args.out,
            stride=args.stride,
            vmin=args.vmin,
            vmax=args.vmax,
        )
        if args.mode != "convergence" and len(args.snapshot) > 1:
            raise ValueError(f"mode {args.mode!r} takes exactly one --snapshot")
        out = render(spec, inputs=args.snapshot)
    except (ValueError, OSError) as err:  # PlotInputError is a ValueError
        print(f"plotview error: {err}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
