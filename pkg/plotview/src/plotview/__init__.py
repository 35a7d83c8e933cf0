"""plotview: headless rendering of solver artifacts to image files."""

from .plots import (
    MODES,
    PlotInputError,
    PlotSpec,
    director_segments,
    plot_convergence,
    plot_director,
    plot_energy_series,
    plot_magnetization,
    quiver_sample,
    read_series,
    read_snapshot_table,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "MODES",
    "PlotInputError",
    "PlotSpec",
    "director_segments",
    "plot_convergence",
    "plot_director",
    "plot_energy_series",
    "plot_magnetization",
    "quiver_sample",
    "read_series",
    "read_snapshot_table",
    "render",
]
