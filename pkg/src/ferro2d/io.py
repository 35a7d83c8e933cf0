"""Plain-text serialization of fields, energy series, iteration curves, and
run summaries.

All numbers are written with 17 significant digits so that reading back
reproduces the double-precision values bit-exactly.  Files are
comma-delimited with a header row; `#` lines before the header carry
metadata (currently the snapshot time).
"""

from __future__ import annotations

import json
import math
import os
from typing import TYPE_CHECKING

import numpy as np

from .analysis import find_defects, linf_stats
from .grid import EnergyBreakdown, FieldState, MField, QField, make_grid

if TYPE_CHECKING:  # pragma: no cover
    from .solver import RunResult

__all__ = [
    "SnapshotFormatError",
    "write_snapshot",
    "read_snapshot",
    "write_energy_series",
    "read_energy_series",
    "write_iteration_series",
    "write_run_summary",
    "dissipation_violations",
    "ENERGY_COLUMNS",
    "ITERATION_COLUMNS",
]

_FMT = "%.17g"

SNAPSHOT_COLUMNS = ("x", "y", "q11", "q12", "m1", "m2", "m3")
ENERGY_COLUMNS = (
    "t", "total", "elastic_q", "elastic_m", "bulk_q", "bulk_m",
    "coupling_qm", "stray", "coupling_qh", "zeeman",
)
ITERATION_COLUMNS = (
    "step", "t", "cumulative_inner_iterations", "inner_iterations",
    "final_increment_norm", "state_change_norm",
)


class SnapshotFormatError(ValueError):
    """Malformed snapshot/series file; message carries the row index."""


def _g(v: float) -> str:
    return _FMT % float(v)


def write_snapshot(state: FieldState, t: float, path: str) -> None:
    """Write one state as `x,y,q11,q12,m1,m2,m3` rows in row-major node order."""
    grid = state.grid
    x, y = grid.coords()
    cols = (x, y, *state.arrays())
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# t = {_g(t)}\n")
            fh.write(",".join(SNAPSHOT_COLUMNS) + "\n")
            for i in range(grid.n_x):
                for j in range(grid.n_y):
                    fh.write(",".join(_g(c[i, j]) for c in cols) + "\n")
    except OSError as err:
        raise OSError(f"could not write snapshot {path!r}: {err}") from err


def read_snapshot(path: str) -> tuple[FieldState, float]:
    """Read a snapshot written by write_snapshot; returns (state, t).

    Raises SnapshotFormatError (with the offending row index) on header
    mismatch, short/long rows, non-numeric cells, a node count that is not a
    perfect square, or coordinates that do not match the implied grid.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as err:
        raise OSError(f"could not read snapshot {path!r}: {err}") from err

    t = 0.0
    k = 0
    while k < len(raw) and raw[k].startswith("#"):
        meta = raw[k][1:].strip()
        if meta.startswith("t") and "=" in meta:
            try:
                t = float(meta.partition("=")[2].strip())
            except ValueError as err:
                raise SnapshotFormatError(f"{path}: bad time comment {raw[k]!r}") from err
        k += 1
    if k >= len(raw) or tuple(raw[k].strip().split(",")) != SNAPSHOT_COLUMNS:
        got = raw[k].strip() if k < len(raw) else "<end of file>"
        raise SnapshotFormatError(
            f"{path}: expected header {','.join(SNAPSHOT_COLUMNS)!r}, got {got!r}"
        )
    rows = [r for r in raw[k + 1 :] if r.strip()]
    n2 = len(rows)
    n = math.isqrt(n2)
    if n * n != n2 or n < 3:
        raise SnapshotFormatError(f"{path}: {n2} data rows do not form an n x n grid with n >= 3")

    data = np.empty((n2, 7))
    for r, line in enumerate(rows):
        parts = line.split(",")
        if len(parts) != 7:
            raise SnapshotFormatError(f"{path}: row {r + 1}: expected 7 fields, got {len(parts)}")
        try:
            data[r] = [float(p) for p in parts]
        except ValueError as err:
            raise SnapshotFormatError(f"{path}: row {r + 1}: non-numeric cell ({err})") from err

    grid = make_grid(n)
    x, y = grid.coords()
    flat = data.reshape(n, n, 7)
    if not (np.array_equal(flat[:, :, 0], x) and np.array_equal(flat[:, :, 1], y)):
        bad = np.argwhere((flat[:, :, 0] != x) | (flat[:, :, 1] != y))[0]
        row = int(bad[0]) * n + int(bad[1]) + 1
        raise SnapshotFormatError(f"{path}: row {row}: coordinates do not match an n={n} grid")
    state = FieldState(
        grid,
        QField(flat[:, :, 2].copy(), flat[:, :, 3].copy()),
        MField(flat[:, :, 4].copy(), flat[:, :, 5].copy(), flat[:, :, 6].copy()),
    )
    return state, t


def write_energy_series(series: list[tuple[float, EnergyBreakdown]], path: str) -> None:
    """Energy breakdown rows; an empty series produces a header-only file."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(ENERGY_COLUMNS) + "\n")
            for t, e in series:
                vals = (t, e.total, e.elastic_q, e.elastic_m, e.bulk_q, e.bulk_m,
                        e.coupling_qm, e.stray, e.coupling_qh, e.zeeman)
                fh.write(",".join(_g(v) for v in vals) + "\n")
    except OSError as err:
        raise OSError(f"could not write energy series {path!r}: {err}") from err


def read_energy_series(path: str) -> list[tuple[float, EnergyBreakdown]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = [r for r in fh.read().splitlines() if r.strip() and not r.startswith("#")]
    except OSError as err:
        raise OSError(f"could not read energy series {path!r}: {err}") from err
    if not raw or tuple(raw[0].strip().split(",")) != ENERGY_COLUMNS:
        got = raw[0].strip() if raw else "<end of file>"
        raise SnapshotFormatError(
            f"{path}: expected header {','.join(ENERGY_COLUMNS)!r}, got {got!r}"
        )
    out = []
    for r, line in enumerate(raw[1:], start=1):
        parts = line.split(",")
        if len(parts) != len(ENERGY_COLUMNS):
            raise SnapshotFormatError(
                f"{path}: row {r}: expected {len(ENERGY_COLUMNS)} fields, got {len(parts)}"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError as err:
            raise SnapshotFormatError(f"{path}: row {r}: non-numeric cell ({err})") from err
        t = vals[0]
        e = EnergyBreakdown(
            elastic_q=vals[2], elastic_m=vals[3], bulk_q=vals[4], bulk_m=vals[5],
            coupling_qm=vals[6], stray=vals[7], coupling_qh=vals[8], zeeman=vals[9],
            total=vals[1],
        )
        out.append((t, e))
    return out


def write_iteration_series(result: "RunResult", path: str) -> None:
    """Per-step iteration counters and norms, for stopping-curve plots."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(ITERATION_COLUMNS) + "\n")
            cum = 0
            for k, rep in enumerate(result.step_reports, start=1):
                cum += rep.inner_iterations
                change = rep.state_change_norm if rep.state_change_norm is not None else math.nan
                fh.write(
                    f"{k},{_g(k * result.config.delta_t)},{cum},{rep.inner_iterations},"
                    f"{_g(rep.final_increment_norm)},{_g(change)}\n"
                )
    except OSError as err:
        raise OSError(f"could not write iteration series {path!r}: {err}") from err


def dissipation_violations(
    series: list[tuple[float, EnergyBreakdown]], rel_tol: float = 1e-8
) -> int:
    """Count recorded energy increases beyond rel_tol * (1 + |E|)."""
    count = 0
    for (_, e0), (_, e1) in zip(series, series[1:]):
        if e1.total > e0.total + rel_tol * (1.0 + abs(e0.total)):
            count += 1
    return count


def write_run_summary(
    result: "RunResult",
    path: str,
    *,
    alignment_margin: float = 0.1,
    linf_margin: float = 0.1,
) -> dict:
    """Structured-text (JSON) digest of one run; returns the written mapping.

    Contains the defect list with positions and windings, alignment metrics
    against the applied-field axis (e_x when the planar field vanishes),
    interior extrema, the dissipation-violation count over the recorded
    energy series, and iteration counters.  Keys are sorted and no
    timestamps are included, so re-running a deterministic run reproduces
    the file byte for byte.
    """
    from .analysis import alignment_metric  # deferred: keeps import graph shallow

    state = result.final_state
    params = result.params
    defects = find_defects(state.q, state.m)
    h1, h2, _ = params.h_ext
    axis = (h1, h2) if (h1, h2) != (0.0, 0.0) else (1.0, 0.0)
    max_q, max_m = linf_stats(state.q, state.m, linf_margin)

    def defect_row(d):
        return {
            "i": d.i, "j": d.j, "x": d.x, "y": d.y,
            "core_value": d.core_value, "winding": d.winding,
        }

    summary = {
        "t_final": result.t_final,
        "steps": len(result.step_reports),
        "steady": result.steady,
        "grid_n": result.grid.n_x,
        "delta_t": result.config.delta_t,
        "h_ext": list(params.h_ext),
        "m3_enabled": params.m3_enabled,
        "defects": {
            "q": [defect_row(d) for d in defects.q_defects],
            "m": [defect_row(d) for d in defects.m_defects],
            "total_q_winding": defects.total_q_winding,
            "total_q_vector_winding": defects.total_q_vector_winding,
            "total_m_winding": defects.total_m_winding,
        },
        "alignment": {
            "axis": list(axis),
            "margin": alignment_margin,
            "director": alignment_metric(state.q, axis, alignment_margin),
            "magnetization": alignment_metric(state.m, axis, alignment_margin),
        },
        "linf": {"margin": linf_margin, "max_q": max_q, "max_m": max_m},
        "dissipation": {
            "violations": dissipation_violations(result.energy_series),
            "rule": "E(t_{k+1}) <= E(t_k) + 1e-8*(1+|E(t_k)|) over recorded rows",
            "checked_pairs": max(len(result.energy_series) - 1, 0),
        },
        "energy": {
            "initial": result.energy_series[0][1].total,
            "final": result.energy_series[-1][1].total,
        },
        "iterations": {
            "total_inner": result.total_inner_iterations,
            "max_inner_per_step": max(
                (r.inner_iterations for r in result.step_reports), default=0
            ),
            "max_final_increment_norm": max(
                (r.final_increment_norm for r in result.step_reports), default=0.0
            ),
            "last_state_change_norm": (
                result.step_reports[-1].state_change_norm if result.step_reports else None
            ),
        },
    }
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as err:
        raise OSError(f"could not write run summary {path!r}: {err}") from err
    return summary


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)
