"""ferro2d: gradient-flow relaxation of a coupled tensor-order /
magnetization model on the unit square, with a line-implicit
Crank-Nicolson integrator and verification tooling."""

from .grid import (
    Grid2D,
    QField,
    MField,
    FieldState,
    ModelParams,
    EnergyBreakdown,
    make_grid,
    director_from_q,
)
from .energy import (
    DimensionalParams,
    ResidualFields,
    nondimensionalize,
    bulk_potential_f,
    total_energy,
    el_residual,
    energy_lower_bound,
    bulk_potential_f_xi,
    compute_k_xi,
    k_xi_minimizer,
)
from .bc import (
    BoundaryData,
    theta_field,
    degree_k_boundary,
    degree_k_initial,
    tangent_bc,
    tangent_ic,
)
from .solver import (
    SolverConfig,
    StepReport,
    RunResult,
    SingularSystemError,
    StepFailureError,
    thomas_solve,
    cn_step,
    run,
)
from .analysis import (
    Defect,
    DefectSet,
    ConvergenceReport,
    find_defects,
    alignment_metric,
    linf_stats,
    convergence_study,
)
from .config import (
    ConfigError,
    Scenario,
    RunConfig,
    parse_config,
    render_config,
    build_problem,
)
from .io import (
    SnapshotFormatError,
    write_snapshot,
    read_snapshot,
    write_energy_series,
    read_energy_series,
    write_iteration_series,
    write_run_summary,
    dissipation_violations,
)

__version__ = "0.1.0"

__all__ = [
    "Grid2D", "QField", "MField", "FieldState", "ModelParams", "EnergyBreakdown",
    "make_grid", "director_from_q",
    "DimensionalParams", "ResidualFields", "nondimensionalize", "bulk_potential_f",
    "total_energy", "el_residual", "energy_lower_bound", "bulk_potential_f_xi",
    "compute_k_xi", "k_xi_minimizer",
    "BoundaryData", "theta_field", "degree_k_boundary", "degree_k_initial",
    "tangent_bc", "tangent_ic",
    "SolverConfig", "StepReport", "RunResult", "SingularSystemError",
    "StepFailureError", "thomas_solve", "cn_step", "run",
    "Defect", "DefectSet", "ConvergenceReport", "find_defects",
    "alignment_metric", "linf_stats", "convergence_study",
    "ConfigError", "Scenario", "RunConfig", "parse_config", "render_config",
    "build_problem",
    "SnapshotFormatError", "write_snapshot", "read_snapshot",
    "write_energy_series", "read_energy_series", "write_iteration_series",
    "write_run_summary", "dissipation_violations",
]
