"""Gradient-flow time integrator.

One time step advances every evolved field by a Crank-Nicolson scheme that is
semi-implicit in x (second difference averaged between time levels) and
explicit in y (second difference at the old level), with the nonlinear
reaction terms taken at the new level and resolved by Newton linearization:
each field contributes one tridiagonal system per grid row, solved by the
Thomas algorithm; cross-field couplings use the latest available iterate of
the other fields (nonlinear Gauss-Seidel in the fixed order Q11, Q12, M1,
M2, M3), and passes repeat until the joint infinity-norm of the increments
drops below the tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bc import BoundaryData
from .energy import EnergyBreakdown, total_energy
from .grid import FieldState, Grid2D, ModelParams

__all__ = [
    "SolverConfig",
    "StepReport",
    "RunResult",
    "SingularSystemError",
    "StepFailureError",
    "thomas_solve",
    "cn_step",
    "run",
]


class SingularSystemError(RuntimeError):
    """A tridiagonal elimination hit a zero or near-zero pivot."""


class StepFailureError(RuntimeError):
    """Inner iterations failed to converge within the configured cap."""

    def __init__(self, message: str, last_increment_norm: float, step_index: int | None = None):
        super().__init__(message)
        self.last_increment_norm = last_increment_norm
        self.step_index = step_index


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping controls.

    delta_t          time step
    epsilon          inner-iteration tolerance on the joint increment
                     infinity-norm; must stay below O(dx^2 + dt^2), which is
                     checked against the grid when stepping
    max_inner_iters  cap on linearization passes per step
    max_time         final time T
    steady_tol       per-step state-change infinity-norm below which the run
                     stops early as steady (0 disables early stopping)
    record_every     cadence (in steps) of energy recording during run()
    linear_mode      verification mode: drop all reaction terms, leaving five
                     decoupled discrete heat equations
    """

    delta_t: float
    max_time: float
    epsilon: float = 1e-6
    max_inner_iters: int = 50
    steady_tol: float = 1e-8
    record_every: int = 1
    linear_mode: bool = False

    def __post_init__(self) -> None:
        if not (self.delta_t > 0.0):
            raise ValueError(f"delta_t must be > 0, got {self.delta_t}")
        if not (self.max_time >= 0.0):
            raise ValueError(f"max_time must be >= 0, got {self.max_time}")
        if not (self.epsilon > 0.0):
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be >= 1")
        if self.steady_tol < 0.0:
            raise ValueError("steady_tol must be >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    def validate_for(self, grid: Grid2D) -> None:
        scale = grid.delta_x**2 + self.delta_t**2
        if not (self.epsilon < scale):
            raise ValueError(
                f"epsilon={self.epsilon} must be < dx^2 + dt^2 = {scale:.3e} for this grid"
            )


@dataclass
class StepReport:
    """Diagnostics of one committed time step."""

    inner_iterations: int
    final_increment_norm: float
    max_abs_q: float
    max_abs_m: float
    energy_before: float | None = None
    energy_after: float | None = None
    state_change_norm: float | None = None  # set by run(): infinity-norm of the step
    increment_norms: list[float] = field(default_factory=list)


_PIVOT_RTOL = 1e-14


def _thomas_batch(a, b, c, d) -> np.ndarray:
    """Thomas elimination for a batch of independent tridiagonal systems.

    a, c: (n-1, m) sub/super-diagonals; b, d: (n, m) main diagonal and right
    side; each column is one system.  Returns the (n, m) solution.
    """
    b = np.asarray(b, dtype=float)
    d = np.asarray(d, dtype=float)
    n = b.shape[0]
    bmax = np.abs(b).max(axis=0)
    cp = np.empty_like(d)  # c'/pivot scratch, last row unused
    xp = np.empty_like(d)
    piv = b[0].copy()
    if np.any(np.abs(piv) < _PIVOT_RTOL * bmax):
        raise SingularSystemError("zero pivot in tridiagonal elimination (row 0)")
    xp[0] = d[0] / piv
    for i in range(1, n):
        cp[i - 1] = c[i - 1] / piv
        piv = b[i] - a[i - 1] * cp[i - 1]
        if np.any(np.abs(piv) < _PIVOT_RTOL * bmax):
            raise SingularSystemError(f"zero pivot in tridiagonal elimination (row {i})")
        xp[i] = (d[i] - a[i - 1] * xp[i - 1]) / piv
    x = xp
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x


def thomas_solve(a, b, c, d) -> np.ndarray:
    """Solve one tridiagonal system a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i.

    a and c carry the n-1 sub/super-diagonal entries; b and d have length n.
    O(n) forward elimination with back substitution; raises
    SingularSystemError when a pivot falls below 1e-14 * max|b|.
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    n = b.shape[0]
    if d.shape[0] != n:
        raise ValueError("b and d must have the same length")
    a = np.zeros(0) if n == 1 else np.asarray(a, dtype=float).reshape(n - 1)
    c = np.zeros(0) if n == 1 else np.asarray(c, dtype=float).reshape(n - 1)
    return _thomas_batch(a[:, None], b[:, None], c[:, None], d[:, None])[:, 0]


# field order of the Gauss-Seidel sweep
_FIELDS = ("q11", "q12", "m1", "m2", "m3")


def _reaction(name: str, w: dict[str, np.ndarray], params: ModelParams, interior):
    """Reaction term f and its own-field derivative f' on the interior slice.

    Cubic bulk terms are differentiated with respect to the field being
    solved; couplings and other-field contributions stay on the right side.
    """
    h1, h2, h3 = params.h_ext
    c1, c2, c3, xi = params.c1, params.c2, params.c3, params.xi
    q11 = w["q11"][interior]
    q12 = w["q12"][interior]
    m1 = w["m1"][interior]
    m2 = w["m2"][interior]
    m3 = w["m3"][interior]
    if name == "q11":
        f = -(q11**2 + q12**2 - 1.0) * q11 + 0.5 * c1 * (m1**2 - m2**2) + 0.5 * c2 * (h1**2 - h2**2)
        fp = 1.0 - 3.0 * q11**2 - q12**2
    elif name == "q12":
        f = -(q11**2 + q12**2 - 1.0) * q12 + c1 * m1 * m2 + c2 * h1 * h2
        fp = 1.0 - q11**2 - 3.0 * q12**2
    elif name == "m1":
        mu = m1**2 + m2**2 + m3**2
        f = -xi * (mu - 1.0) * m1 + c1 * (q11 * m1 + q12 * m2) + c3 * xi * h1
        fp = xi * (1.0 - 3.0 * m1**2 - m2**2 - m3**2)
    elif name == "m2":
        mu = m1**2 + m2**2 + m3**2
        f = -xi * (mu - 1.0) * m2 + c1 * (q12 * m1 - q11 * m2) + c3 * xi * h2
        fp = xi * (1.0 - m1**2 - 3.0 * m2**2 - m3**2)
    else:  # m3
        mu = m1**2 + m2**2 + m3**2
        f = -xi * (mu - 1.0) * m3 + c3 * xi * (h3 - m3)
        fp = xi * (1.0 - m1**2 - m2**2 - 3.0 * m3**2)
    return f, fp


def _d2x(u: np.ndarray, dx: float) -> np.ndarray:
    """Second difference in x on the interior slice."""
    return (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / dx**2


def _d2y(u: np.ndarray, dy: float) -> np.ndarray:
    """Second difference in y on the interior slice."""
    return (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / dy**2


def cn_step(
    state: FieldState,
    boundary: BoundaryData,
    params: ModelParams,
    config: SolverConfig,
) -> tuple[FieldState, StepReport]:
    """Advance the state by one time step.

    Boundary nodes are pinned to the boundary data on entry and after the
    commit, so Dirichlet data survives bit-exactly.  Raises StepFailureError
    if the inner iteration does not converge within max_inner_iters.
    """
    grid = state.grid
    config.validate_for(grid)
    dx, dy, dt = grid.delta_x, grid.delta_y, config.delta_t
    interior = (slice(1, -1), slice(1, -1))
    zero_m3 = not params.m3_enabled

    old = state.copy()
    if zero_m3:
        old.m.m3[:] = 0.0  # the disabled component is held at zero everywhere
    boundary.apply(old, zero_m3=zero_m3)
    zn = dict(zip(_FIELDS, old.arrays()))
    work = old.copy()
    w = dict(zip(_FIELDS, work.arrays()))

    diff = {"q11": 2.0 * params.l1, "q12": 2.0 * params.l1,
            "m1": params.l2 * params.xi, "m2": params.l2 * params.xi,
            "m3": params.l2 * params.xi}
    eta = {"q11": params.eta1, "q12": params.eta1,
           "m1": params.eta2, "m2": params.eta2, "m3": params.eta2}

    evolved = [f for f in _FIELDS if not (f == "m3" and zero_m3)]
    # y-direction stays explicit: frozen at the old level for every pass
    d2x_old = {f: _d2x(zn[f], dx) for f in evolved}
    d2y_old = {f: _d2y(zn[f], dy) for f in evolved}

    ishape = (grid.n_x - 2, grid.n_y - 2)  # systems run along i, batched over j
    norms: list[float] = []
    for sweep in range(1, config.max_inner_iters + 1):
        max_inc = 0.0
        for name in evolved:
            l = diff[name]
            et = eta[name]
            if config.linear_mode:
                f = fp = 0.0
            else:
                f, fp = _reaction(name, w, params, interior)
            resid = (
                -et * (w[name][interior] - zn[name][interior]) / dt
                + 0.5 * l * (_d2x(w[name], dx) + d2x_old[name])
                + l * d2y_old[name]
                + f
            )
            b = np.full(ishape, et / dt + l / dx**2) - fp
            off = np.full((ishape[0] - 1, ishape[1]), -0.5 * l / dx**2)
            delta = _thomas_batch(off, b, off, resid)
            w[name][interior] += delta
            inc = float(np.abs(delta).max())
            if inc > max_inc:
                max_inc = inc
        norms.append(max_inc)
        if max_inc < config.epsilon:
            break
    else:
        raise StepFailureError(
            f"inner iteration stalled at increment norm {max_inc:.3e} "
            f"after {config.max_inner_iters} passes (epsilon={config.epsilon})",
            last_increment_norm=max_inc,
        )

    boundary.apply(work, zero_m3=zero_m3)
    report = StepReport(
        inner_iterations=len(norms),
        final_increment_norm=norms[-1],
        max_abs_q=float(np.sqrt(2.0 * work.q.order().max())),
        max_abs_m=float(np.sqrt(work.m.norm2().max())),
        increment_norms=norms,
    )
    return work, report


@dataclass
class RunResult:
    """Trajectory summary produced by run()."""

    grid: Grid2D
    params: ModelParams
    config: SolverConfig
    times: list[float]
    snapshots: list[tuple[float, FieldState]]
    energy_series: list[tuple[float, EnergyBreakdown]]
    step_reports: list[StepReport]
    steady: bool
    final_state: FieldState

    @property
    def t_final(self) -> float:
        return self.times[-1] if self.times else 0.0

    @property
    def total_inner_iterations(self) -> int:
        return sum(r.inner_iterations for r in self.step_reports)


def run(
    state0: FieldState,
    boundary: BoundaryData,
    params: ModelParams,
    config: SolverConfig,
    *,
    snapshot_every: int = 0,
) -> RunResult:
    """Integrate until t >= max_time or the state change falls below steady_tol.

    The energy breakdown is recorded at t=0, every record_every-th step, and
    at the final step.  snapshot_every > 0 additionally stores state copies at
    that step cadence; the initial and final states are always kept.  If the
    out-of-plane component is disabled, M3 is zeroed once up front and never
    evolved.
    """
    grid = state0.grid
    config.validate_for(grid)
    if snapshot_every < 0:
        raise ValueError("snapshot_every must be >= 0")
    zero_m3 = not params.m3_enabled

    state = state0.copy()
    if zero_m3:
        state.m.m3[:] = 0.0
    boundary.apply(state, zero_m3=zero_m3)

    energy_series: list[tuple[float, EnergyBreakdown]] = [
        (0.0, total_energy(state.q, state.m, params, grid))
    ]
    snapshots: list[tuple[float, FieldState]] = [(0.0, state.copy())]
    times = [0.0]
    reports: list[StepReport] = []
    steady = False
    e_prev = energy_series[0][1].total

    n_steps = int(round(config.max_time / config.delta_t))
    step = 0
    t = 0.0
    while step < n_steps:
        prev = state
        try:
            state, report = cn_step(state, boundary, params, config)
        except StepFailureError as err:
            err.step_index = step
            raise
        step += 1
        t = step * config.delta_t
        times.append(t)

        change = max(
            float(np.abs(b - a).max()) for a, b in zip(prev.arrays(), state.arrays())
        )
        report.state_change_norm = change
        if config.steady_tol > 0.0 and change < config.steady_tol:
            steady = True
        recording = (step % config.record_every == 0) or (step == n_steps) or steady
        if recording:
            e = total_energy(state.q, state.m, params, grid)
            report.energy_before = e_prev
            report.energy_after = e.total
            e_prev = e.total
            energy_series.append((t, e))
        if snapshot_every > 0 and step % snapshot_every == 0 and not (step == n_steps or steady):
            snapshots.append((t, state.copy()))
        reports.append(report)
        if steady:
            break
    if step > 0:
        snapshots.append((t, state.copy()))

    return RunResult(
        grid=grid,
        params=params,
        config=config,
        times=times,
        snapshots=snapshots,
        energy_series=energy_series,
        step_reports=reports,
        steady=steady,
        final_state=state,
    )
