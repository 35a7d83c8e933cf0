"""Post-processing: defect detection, alignment metrics, field extrema,
and grid/time self-convergence studies.

Defects are located as strict interior local minima of the relevant order
field (q11^2+q12^2 for the tensor field, m1^2+m2^2 for the planar
magnetization) that fall below a detection threshold; the winding is read
off by summing wrapped angle increments of the corresponding 2-vector
around the 8-node loop enclosing the minimum.  For the tensor field the
reported winding is the nematic charge, i.e. half of the (q11,q12)-vector
winding, so it comes in half-integer steps.

Candidates are restricted to nodes whose 8-node loop lies entirely in the
interior.  A loop that touches the boundary crosses pinned Dirichlet data,
and edge-wise constant data jumps by a half-turn at the square corners;
the wrapped angle increment across such a jump is exactly pi, whose sign
is decided by rounding noise, so the winding there is not well defined.
Order-field minima hugging a corner (boundary-pinned cores) are therefore
deliberately not reported as interior defects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import FieldState, MField, QField

__all__ = [
    "Defect",
    "DefectSet",
    "ConvergenceReport",
    "find_defects",
    "alignment_metric",
    "linf_stats",
    "convergence_study",
]


@dataclass(frozen=True)
class Defect:
    """One detected zero of an order field."""

    kind: str  # "q" or "m"
    i: int
    j: int
    x: float
    y: float
    core_value: float  # order-field value at the minimum
    winding: float  # half-integers for q (nematic charge), integers for m


@dataclass
class DefectSet:
    """All defects found in one state."""

    q_defects: list[Defect] = field(default_factory=list)
    m_defects: list[Defect] = field(default_factory=list)

    @property
    def total_q_winding(self) -> float:
        """Sum of nematic charges (half-integer units)."""
        return sum(d.winding for d in self.q_defects)

    @property
    def total_q_vector_winding(self) -> float:
        """Sum of (q11,q12)-vector windings, i.e. twice the charge sum."""
        return 2.0 * self.total_q_winding

    @property
    def total_m_winding(self) -> float:
        return sum(d.winding for d in self.m_defects)


# counterclockwise 8-node loop around a node, as (di, dj) offsets
_LOOP = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def _loop_winding(u: np.ndarray, v: np.ndarray, i: int, j: int) -> float:
    """Winding number of the vector field (u, v) around node (i, j)."""
    ang = [math.atan2(v[i + di, j + dj], u[i + di, j + dj]) for di, dj in _LOOP]
    total = 0.0
    for k in range(len(ang)):
        d = ang[(k + 1) % len(ang)] - ang[k]
        total += math.atan2(math.sin(d), math.cos(d))  # wrap to (-pi, pi]
    return total / (2.0 * math.pi)


def _local_minima(core: np.ndarray, threshold: float) -> list[tuple[int, int]]:
    """Nodes strictly below all 8 neighbors and below the threshold, at
    least two nodes away from the boundary so the winding loop around them
    never touches pinned boundary data."""
    if core.shape[0] < 5 or core.shape[1] < 5:
        return []
    c = core[2:-2, 2:-2]
    is_min = c < threshold
    for di, dj in _LOOP:
        nb = core[2 + di : core.shape[0] - 2 + di, 2 + dj : core.shape[1] - 2 + dj]
        is_min &= c < nb
    return [(int(i) + 2, int(j) + 2) for i, j in zip(*np.nonzero(is_min))]


def _boundary_max(core: np.ndarray) -> float:
    return float(
        max(core[0, :].max(), core[-1, :].max(), core[:, 0].max(), core[:, -1].max())
    )


def find_defects(
    q: QField,
    m: MField,
    threshold: float | None = None,
) -> DefectSet:
    """Locate zeros of the tensor and planar-magnetization order fields.

    threshold is an absolute cutoff on the order-field value at the minimum;
    by default it is 10% of the maximum order value on the boundary (the
    far-field amplitude), computed separately per field.  Reported defects
    are strict local minima whose 8-node winding loop is fully interior;
    an empty set is a valid result.
    """
    if threshold is not None and not (threshold > 0.0):
        raise ValueError(f"threshold must be > 0, got {threshold}")
    n_x, n_y = q.q11.shape
    hx, hy = 1.0 / (n_x - 1), 1.0 / (n_y - 1)

    out = DefectSet()
    for kind, u, v in (("q", q.q11, q.q12), ("m", m.m1, m.m2)):
        core = u * u + v * v
        thr = threshold
        if thr is None:
            far = _boundary_max(core)
            if far == 0.0:
                far = float(core.max())
            thr = 0.1 * far
        cands = []
        for i, j in _local_minima(core, thr):
            w_vec = _loop_winding(u, v, i, j)
            if kind == "q":
                winding = round(w_vec) / 2.0  # vector winding -> nematic charge
            else:
                winding = float(round(w_vec))
            if winding != 0.0:
                cands.append(
                    Defect(kind, i, j, i * hx, j * hy, float(core[i, j]), winding)
                )
        cands.sort(key=lambda d: (d.i, d.j))  # strict minima are never adjacent
        if kind == "q":
            out.q_defects = cands
        else:
            out.m_defects = cands
    return out


def _margin_mask(shape: tuple[int, int], margin: float) -> np.ndarray:
    """Mask of nodes at distance >= margin from the unit-square boundary."""
    n_x, n_y = shape
    x = np.linspace(0.0, 1.0, n_x)[:, None]
    y = np.linspace(0.0, 1.0, n_y)[None, :]
    dist = np.minimum(np.minimum(x, 1.0 - x), np.minimum(y, 1.0 - y))
    return dist >= margin - 1e-12


def alignment_metric(u: QField | MField, axis: tuple[float, float], margin: float = 0.0) -> float:
    """Mean alignment of a field with a fixed in-plane axis, in [0, 1].

    For the magnetization the score per node is |m_planar . axis| / |m_planar|;
    for the tensor field it is |cos 2(phi - phi_axis)| with phi the director
    angle.  margin >= 0 strips a boundary layer of that width before
    averaging, and degenerate nodes (zero planar magnitude) are excluded.
    """
    if margin < 0.0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    a1, a2 = float(axis[0]), float(axis[1])
    norm = math.hypot(a1, a2)
    if norm == 0.0:
        raise ValueError("axis must be a nonzero 2-vector")
    a1, a2 = a1 / norm, a2 / norm

    if isinstance(u, QField):
        # cos 2(phi - phi_axis) = (q11 cos 2phi_a + q12 sin 2phi_a) / |q|
        c2, s2 = a1 * a1 - a2 * a2, 2.0 * a1 * a2
        num = np.abs(u.q11 * c2 + u.q12 * s2)
        mag = np.sqrt(u.q11**2 + u.q12**2)
    elif isinstance(u, MField):
        num = np.abs(u.m1 * a1 + u.m2 * a2)
        mag = np.sqrt(u.m1**2 + u.m2**2)
    else:
        raise TypeError(f"expected QField or MField, got {type(u).__name__}")

    keep = _margin_mask(num.shape, margin) & (mag > 0.0)
    if not keep.any():
        raise ValueError("no nondegenerate nodes retained; reduce margin")
    return float((num[keep] / mag[keep]).mean())


def linf_stats(q: QField, m: MField, interior_margin: float = 0.0) -> tuple[float, float]:
    """(max |Q|, max |M|) over nodes at distance >= interior_margin from the
    boundary, with |Q| = sqrt(2(q11^2+q12^2)) and |M| the full 3-vector norm."""
    if interior_margin < 0.0:
        raise ValueError(f"interior_margin must be >= 0, got {interior_margin}")
    keep = _margin_mask(q.q11.shape, interior_margin)
    if not keep.any():
        raise ValueError("margin leaves no nodes")
    qmag = np.sqrt(2.0 * (q.q11**2 + q.q12**2))
    mmag = np.sqrt(m.m1**2 + m.m2**2 + m.m3**2)
    return float(qmag[keep].max()), float(mmag[keep].max())


@dataclass
class ConvergenceReport:
    """Self-convergence errors and least-squares order estimates.

    grid_errors / time_errors list (resolution, final-time infinity-norm
    error against the finest run) pairs, finest entry included with error 0.
    Orders are the least-squares log-log slope of the successive-difference
    norms D_k = ||u_k - u_{k+1}|| against the coarser resolution of each
    pair; for an order-p scheme D_k scales like the p-th power of that
    resolution, so the slope recovers p without the finest run's zero error
    entering a logarithm.
    """

    grid_errors: list[tuple[float, float]]
    time_errors: list[tuple[float, float]]
    estimated_spatial_order: float
    estimated_temporal_order: float


def _state_diff(coarse: FieldState, fine: FieldState, stride: int) -> float:
    """Infinity-norm difference over coincident nodes of nested grids."""
    return max(
        float(np.abs(c - f[::stride, ::stride]).max())
        for c, f in zip(coarse.arrays(), fine.arrays())
    )


def _ls_order(pairs: list[tuple[float, float]]) -> float:
    """Least-squares slope of log(D) against log(resolution)."""
    hs = np.log([h for h, _ in pairs])
    ds = np.log([max(d, 1e-300) for _, d in pairs])
    slope, _ = np.polyfit(hs, ds, 1)
    return float(slope)


SPATIAL_STEPS = (0.04, 0.02, 0.01)  # node counts 26, 51, 101 on the unit square
TEMPORAL_STEPS = (4e-5, 2e-5, 1e-5)
TEMPORAL_DELTA_X = 0.02


def convergence_study(base: "RunConfig") -> "ConvergenceReport":  # noqa: F821
    """Grid and time-step self-convergence against the finest resolution.

    Spatial: delta_x in {0.04, 0.02, 0.01} (factor-2 nested, so coarse nodes
    coincide with fine nodes) at fixed delta_t = 1e-5.  Temporal: delta_t in
    {4e-5, 2e-5, 1e-5} at fixed delta_x = 0.02.  All runs integrate the base
    configuration's scenario to its max_time with early stopping disabled.
    """
    from .config import RunConfig, build_problem  # deferred to avoid an import cycle

    if not isinstance(base, RunConfig):
        raise TypeError("base must be a RunConfig")
    horizon = base.solver.max_time
    if horizon > 0:
        for dt in TEMPORAL_STEPS:
            n_steps = horizon / dt
            if abs(n_steps - round(n_steps)) > 1e-9 * max(1.0, n_steps):
                raise ValueError(
                    f"max_time={horizon} is not an integer multiple of delta_t={dt}"
                )

    from .solver import run  # local import keeps module load order flexible

    def final_state(n: int, dt: float) -> FieldState:
        cfg = base.with_overrides(n=n, delta_t=dt, steady_tol=0.0, record_every=10**9)
        state0, boundary, params, solver_cfg = build_problem(cfg)
        return run(state0, boundary, params, solver_cfg).final_state

    # ---- spatial sweep ---------------------------------------------------
    dt_fixed = TEMPORAL_STEPS[-1]
    spatial_states = []
    for dx in SPATIAL_STEPS:
        n = round(1.0 / dx) + 1
        spatial_states.append((dx, final_state(n, dt_fixed)))
    finest = spatial_states[-1][1]
    grid_errors = []
    for dx, st in spatial_states:
        stride = round(dx / SPATIAL_STEPS[-1])
        grid_errors.append((dx, _state_diff(st, finest, stride) if stride > 1 else 0.0))
    spatial_pairs = []
    for (dx_c, st_c), (_, st_f) in zip(spatial_states, spatial_states[1:]):
        spatial_pairs.append((dx_c, _state_diff(st_c, st_f, 2)))
    est_spatial = _ls_order(spatial_pairs)

    # ---- temporal sweep --------------------------------------------------
    n_t = round(1.0 / TEMPORAL_DELTA_X) + 1
    temporal_states = [(dt, final_state(n_t, dt)) for dt in TEMPORAL_STEPS]
    finest_t = temporal_states[-1][1]
    time_errors = []
    for dt, st in temporal_states[:-1]:
        time_errors.append((dt, _state_diff(st, finest_t, 1)))
    time_errors.append((TEMPORAL_STEPS[-1], 0.0))
    temporal_pairs = []
    for (dt_c, st_c), (_, st_f) in zip(temporal_states, temporal_states[1:]):
        temporal_pairs.append((dt_c, _state_diff(st_c, st_f, 1)))
    est_temporal = _ls_order(temporal_pairs)

    return ConvergenceReport(
        grid_errors=grid_errors,
        time_errors=time_errors,
        estimated_spatial_order=est_spatial,
        estimated_temporal_order=est_temporal,
    )
