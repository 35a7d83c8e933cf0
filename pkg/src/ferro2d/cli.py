"""Command-line interface.

Subcommands:
  run <config>            integrate one configuration and write artifacts
  converge <config>       nested grid/time self-convergence study
  reproduce <figure-id>   execute a built-in preset (all its variants)
  energy <snapshot> <config>  recompute the energy breakdown of a snapshot

Exit codes: 0 success, 1 configuration error (including unknown figure ids),
2 solver failure, 3 I/O or file-format error.

Artifacts written by `run` (and per variant by `reproduce`) into the
configured output directory:
  config.txt        the exact configuration (reparseable)
  snapshot_initial.csv / snapshot_final.csv, plus snapshot_<step>.csv at the
                    configured cadence
  energy.csv        recorded energy breakdown series
  iterations.csv    per-step inner-iteration counts and norms
  summary.json      defects, alignment, extrema, dissipation check, counters
All outputs are deterministic: re-running a configuration reproduces every
byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .analysis import convergence_study
from .config import ConfigError, RunConfig, parse_config, render_config, build_problem
from .io import (
    SnapshotFormatError,
    ensure_dir,
    read_snapshot,
    write_energy_series,
    write_iteration_series,
    write_run_summary,
    write_snapshot,
    ENERGY_COLUMNS,
)
from .energy import total_energy
from .presets import get_preset
from .solver import RunResult, SingularSystemError, StepFailureError, run

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_IO = 3


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _execute(cfg: RunConfig) -> RunResult:
    """Run one configuration and write all artifacts to its output directory."""
    state0, boundary, params, solver_cfg = build_problem(cfg)
    result = run(state0, boundary, params, solver_cfg, snapshot_every=cfg.snapshot_every)
    out = cfg.output_dir
    ensure_dir(out)
    with open(os.path.join(out, "config.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_config(cfg))
    for idx, (t, state) in enumerate(result.snapshots):
        if idx == 0:
            name = "snapshot_initial.csv"
        elif idx == len(result.snapshots) - 1:
            name = "snapshot_final.csv"
        else:
            name = f"snapshot_{round(t / solver_cfg.delta_t):06d}.csv"
        write_snapshot(state, t, os.path.join(out, name))
    if len(result.snapshots) == 1:  # zero-step run: the initial state is final
        t0, s0 = result.snapshots[0]
        write_snapshot(s0, t0, os.path.join(out, "snapshot_final.csv"))
    write_energy_series(result.energy_series, os.path.join(out, "energy.csv"))
    write_iteration_series(result, os.path.join(out, "iterations.csv"))
    write_run_summary(result, os.path.join(out, "summary.json"))
    return result


def _report_line(label: str, result: RunResult) -> str:
    e_final = result.energy_series[-1][1].total
    return (
        f"{label}: t={result.t_final:g} steps={len(result.step_reports)} "
        f"steady={str(result.steady).lower()} energy={e_final:.9g} "
        f"inner_iterations={result.total_inner_iterations}"
    )


def _cmd_run(args) -> int:
    cfg = parse_config(_read_text(args.config))
    if args.output_dir:
        cfg = cfg.with_overrides(output_dir=args.output_dir)
    result = _execute(cfg)
    print(_report_line(cfg.output_dir, result))
    return EXIT_OK


def _cmd_converge(args) -> int:
    cfg = parse_config(_read_text(args.config))
    if args.output_dir:
        cfg = cfg.with_overrides(output_dir=args.output_dir)
    report = convergence_study(cfg)
    ensure_dir(cfg.output_dir)
    payload = {
        "grid_errors": [[dx, err] for dx, err in report.grid_errors],
        "time_errors": [[dt, err] for dt, err in report.time_errors],
        "estimated_spatial_order": report.estimated_spatial_order,
        "estimated_temporal_order": report.estimated_temporal_order,
    }
    path = os.path.join(cfg.output_dir, "convergence.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"spatial order {report.estimated_spatial_order:.3f}, "
        f"temporal order {report.estimated_temporal_order:.3f} -> {path}"
    )
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    variants = get_preset(args.figure_id)
    for name, cfg in variants:
        if args.output_dir:
            cfg = cfg.with_overrides(
                output_dir=os.path.join(args.output_dir, args.figure_id, name)
            )
        result = _execute(cfg)
        print(_report_line(f"{args.figure_id}/{name}", result))
    return EXIT_OK


def _cmd_energy(args) -> int:
    state, t = read_snapshot(args.snapshot)
    cfg = parse_config(_read_text(args.config))
    if state.grid.n_x != cfg.n:
        raise ConfigError(
            [f"snapshot grid n={state.grid.n_x} does not match config grid.n={cfg.n}"]
        )
    e = total_energy(state.q, state.m, cfg.model, state.grid)
    vals = (t, e.total, e.elastic_q, e.elastic_m, e.bulk_q, e.bulk_m,
            e.coupling_qm, e.stray, e.coupling_qh, e.zeeman)
    print(",".join(ENERGY_COLUMNS))
    print(",".join("%.17g" % v for v in vals))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ferro2d",
        description="2-D ferronematic gradient-flow solver and verification tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configuration")
    p_run.add_argument("config", help="path to a flat key = value config file")
    p_run.add_argument("--output-dir", help="override output.directory")
    p_run.set_defaults(func=_cmd_run)

    p_conv = sub.add_parser("converge", help="grid/time self-convergence study")
    p_conv.add_argument("config", help="base configuration for the study")
    p_conv.add_argument("--output-dir", help="override output.directory")
    p_conv.set_defaults(func=_cmd_converge)

    p_rep = sub.add_parser("reproduce", help="run a built-in preset")
    p_rep.add_argument("figure_id", help="preset id, e.g. fig2 or test-xi1")
    p_rep.add_argument("--output-dir", help="base directory for preset outputs")
    p_rep.set_defaults(func=_cmd_reproduce)

    p_en = sub.add_parser("energy", help="energy breakdown of a snapshot")
    p_en.add_argument("snapshot", help="snapshot csv written by run")
    p_en.add_argument("config", help="config supplying the model parameters")
    p_en.set_defaults(func=_cmd_energy)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        for issue in err.issues:
            print(f"config error: {issue}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyError as err:
        print(f"error: {err.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except (StepFailureError, SingularSystemError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except SnapshotFormatError as err:
        print(f"file format error: {err}", file=sys.stderr)
        return EXIT_IO
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
