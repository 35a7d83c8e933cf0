"""Figure rendering for solver artifacts.

Four modes, all headless (Agg backend) and read-only on their inputs:

  director        unoriented black bars at the local director angle
                  phi = 0.5*atan2(q12, q11) over a heatmap of q11^2 + q12^2;
                  nodes with vanishing order carry no bar
  magnetization   oriented arrows (m1, m2) over a heatmap of m1^2 + m2^2;
                  nodes with vanishing planar magnetization carry no arrow
  energy_series   total energy versus time from an energy csv
  convergence     per-step state change versus cumulative inner iterations
                  (log scale) from one or more iteration csv files, with a
                  1e-6 reference line

Inputs are the delimited-text artifacts written by the solver CLI; this
package parses them independently and never imports the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

import matplotlib

matplotlib.use("Agg")  # must precede pyplot: plots render without a display
import matplotlib.pyplot as plt
from matplotlib.collections import LineCollection

__all__ = [
    "PlotInputError",
    "PlotSpec",
    "MODES",
    "read_snapshot_table",
    "read_series",
    "director_segments",
    "quiver_sample",
    "plot_director",
    "plot_magnetization",
    "plot_energy_series",
    "plot_convergence",
]

MODES = ("director", "magnetization", "energy_series", "convergence")

SNAPSHOT_COLUMNS = ("x", "y", "q11", "q12", "m1", "m2", "m3")

# glyphs vanish where the field has no direction to show
_DEGENERATE = 1e-8

_FIELD_FIGSIZE = (6.0, 6.0)
_SERIES_FIGSIZE = (6.4, 4.8)
_DPI = 150


class PlotInputError(ValueError):
    """Unusable input file: missing columns, empty series, bad layout."""


@dataclass(frozen=True)
class PlotSpec:
    """Rendering request; `snapshot` names the input artifact of the mode."""

    snapshot: str
    mode: str
    out: str
    stride: int = 2
    vmin: float | None = None
    vmax: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        explicit = (self.vmin is not None, self.vmax is not None)
        if any(explicit) and not all(explicit):
            raise ValueError("color range must be auto (neither bound) or explicit (both)")
        if all(explicit) and not (self.vmin < self.vmax):
            raise ValueError(f"color range needs vmin < vmax, got ({self.vmin}, {self.vmax})")


def _data_lines(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return [ln for ln in fh.read().splitlines() if ln.strip() and not ln.startswith("#")]


def read_snapshot_table(path: str) -> dict[str, np.ndarray]:
    """Parse a field snapshot into (n, n) arrays keyed by column name.

    Expects the header `x,y,q11,q12,m1,m2,m3` and n*n rows in row-major
    node order (x varies slowest).
    """
    lines = _data_lines(path)
    if not lines:
        raise PlotInputError(f"{path}: empty snapshot")
    header = tuple(c.strip() for c in lines[0].split(","))
    missing = [c for c in SNAPSHOT_COLUMNS if c not in header]
    if missing:
        raise PlotInputError(f"{path}: missing columns {', '.join(missing)}")
    rows = lines[1:]
    n = math.isqrt(len(rows))
    if n * n != len(rows) or n < 2:
        raise PlotInputError(f"{path}: {len(rows)} data rows do not form an n x n grid")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in rows])
    except ValueError as err:
        raise PlotInputError(f"{path}: non-numeric cell ({err})") from err
    if data.shape[1] != len(header):
        raise PlotInputError(f"{path}: rows do not match the header width")
    return {name: data[:, k].reshape(n, n) for k, name in enumerate(header)}


def read_series(path: str) -> dict[str, np.ndarray]:
    """Parse a delimited series (energy or iteration csv) into column vectors."""
    lines = _data_lines(path)
    if not lines:
        raise PlotInputError(f"{path}: empty series file")
    header = tuple(c.strip() for c in lines[0].split(","))
    if len(lines) == 1:
        raise PlotInputError(f"{path}: series has a header but no data rows")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as err:
        raise PlotInputError(f"{path}: non-numeric cell ({err})") from err
    if data.shape[1] != len(header):
        raise PlotInputError(f"{path}: rows do not match the header width")
    return {name: data[:, k] for k, name in enumerate(header)}


def _require(table: dict[str, np.ndarray], names: tuple[str, ...], path: str) -> None:
    missing = [c for c in names if c not in table]
    if missing:
        raise PlotInputError(f"{path}: missing columns {', '.join(missing)}")


def director_segments(
    q11: np.ndarray, q12: np.ndarray, stride: int, spacing: float
) -> np.ndarray:
    """Bar endpoints (k, 2, 2) for the strided node set; degenerate nodes skipped.

    Each bar is an unoriented segment of half-length 0.4*stride*spacing
    centered on its node at angle phi = 0.5*atan2(q12, q11).
    """
    n = q11.shape[0]
    idx = np.arange(0, n, stride)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    qa, qb = q11[ii, jj], q12[ii, jj]
    s = np.sqrt(qa**2 + qb**2)
    keep = s >= _DEGENERATE
    phi = 0.5 * np.arctan2(qb[keep], qa[keep])
    cx = ii[keep] * spacing
    cy = jj[keep] * spacing
    half = 0.4 * stride * spacing
    dx, dy = half * np.cos(phi), half * np.sin(phi)
    return np.stack(
        [np.stack([cx - dx, cy - dy], axis=1), np.stack([cx + dx, cy + dy], axis=1)],
        axis=1,
    )


def quiver_sample(
    m1: np.ndarray, m2: np.ndarray, stride: int, spacing: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(x, y, u, v) arrow data on the strided node set; degenerate nodes skipped."""
    n = m1.shape[0]
    idx = np.arange(0, n, stride)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    u, v = m1[ii, jj], m2[ii, jj]
    keep = np.sqrt(u**2 + v**2) >= _DEGENERATE
    return ii[keep] * spacing, jj[keep] * spacing, u[keep], v[keep]


def _field_figure(core: np.ndarray, spec: PlotSpec, title: str):
    n = core.shape[0]
    fig, ax = plt.subplots(figsize=_FIELD_FIGSIZE, dpi=_DPI)
    # arrays are indexed [i, j] = (x, y); imshow wants y as rows
    im = ax.imshow(
        core.T,
        origin="lower",
        extent=(0.0, 1.0, 0.0, 1.0),
        cmap="viridis",
        vmin=spec.vmin,
        vmax=spec.vmax,
        interpolation="nearest",
    )
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    return fig, ax, 1.0 / (n - 1)


def _save(fig, out: str) -> str:
    fig.savefig(out, dpi=_DPI)
    plt.close(fig)
    return out


def plot_director(snapshot: str, spec: PlotSpec) -> str:
    """Director bars over the q11^2 + q12^2 heatmap; returns the image path."""
    table = read_snapshot_table(snapshot)
    _require(table, ("q11", "q12"), snapshot)
    q11, q12 = table["q11"], table["q12"]
    fig, ax, spacing = _field_figure(q11**2 + q12**2, spec, "director / order")
    segs = director_segments(q11, q12, spec.stride, spacing)
    ax.add_collection(LineCollection(segs, colors="black", linewidths=1.0))
    return _save(fig, spec.out)


def plot_magnetization(snapshot: str, spec: PlotSpec) -> str:
    """Planar-magnetization arrows over the m1^2 + m2^2 heatmap."""
    table = read_snapshot_table(snapshot)
    _require(table, ("m1", "m2"), snapshot)
    m1, m2 = table["m1"], table["m2"]
    fig, ax, spacing = _field_figure(m1**2 + m2**2, spec, "planar magnetization")
    x, y, u, v = quiver_sample(m1, m2, spec.stride, spacing)
    if x.size:
        ax.quiver(x, y, u, v, color="black", angles="xy", width=0.004)
    return _save(fig, spec.out)


def plot_energy_series(series: str, spec: PlotSpec) -> str:
    """Total energy versus time."""
    table = read_series(series)
    _require(table, ("t", "total"), series)
    fig, ax = plt.subplots(figsize=_SERIES_FIGSIZE, dpi=_DPI)
    ax.plot(table["t"], table["total"], color="tab:blue")
    ax.set_xlabel("t")
    ax.set_ylabel("total energy")
    ax.set_title("energy decay")
    ax.grid(True, alpha=0.3)
    return _save(fig, spec.out)


def plot_convergence(series_paths: list[str] | str, spec: PlotSpec) -> str:
    """Per-step state change vs cumulative inner iterations, log scale.

    Accepts one path or several (one curve each); a dashed line marks the
    1e-6 stopping tolerance.
    """
    if isinstance(series_paths, str):
        series_paths = [series_paths]
    if not series_paths:
        raise PlotInputError("convergence mode needs at least one iteration file")
    fig, ax = plt.subplots(figsize=_SERIES_FIGSIZE, dpi=_DPI)
    for path in series_paths:
        table = read_series(path)
        _require(table, ("cumulative_inner_iterations", "state_change_norm"), path)
        x = table["cumulative_inner_iterations"]
        y = table["state_change_norm"]
        ok = np.isfinite(y) & (y > 0)
        if not ok.any():
            raise PlotInputError(f"{path}: no positive state-change values to plot")
        ax.semilogy(x[ok], y[ok], label=path.rsplit("/", 1)[-1])
    ax.axhline(1e-6, color="black", linestyle="--", linewidth=1.0, label="1e-6 tolerance")
    ax.set_xlabel("cumulative inner iterations")
    ax.set_ylabel("state change per step")
    ax.set_title("stopping curve")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, spec.out)


def render(spec: PlotSpec, inputs: list[str] | None = None) -> str:
    """Dispatch one PlotSpec; `inputs` overrides spec.snapshot (convergence
    mode accepts several)."""
    paths = inputs if inputs else [spec.snapshot]
    if spec.mode == "director":
        return plot_director(paths[0], spec)
    if spec.mode == "magnetization":
        return plot_magnetization(paths[0], spec)
    if spec.mode == "energy_series":
        return plot_energy_series(paths[0], spec)
    return plot_convergence(paths, spec)
