"""Dimensionless energy, its discrete gradient, and derived constants.

The energy density is

    (l1/2)|grad Q|^2 + (xi*l2/2)|grad M|^2
    + (1/4)((1/2)|Q|^2 - 1)^2 + (xi/4)(|M|^2 - 1)^2
    - (c1/2) QM.M + (c3*xi/2) M3^2 - (c2/2) QH.H - c3*xi M.H

with QM.M = Q11*(M1^2 - M2^2) + 2*Q12*M1*M2 (same contraction for QH.H)
and |Q|^2 = 2*(Q11^2 + Q12^2), |grad Q|^2 = 2*(|grad Q11|^2 + |grad Q12|^2).

Discretization: the elastic terms are assembled as edge sums of forward
differences with trapezoid weights in the transverse direction; nodal terms
use the trapezoidal rule.  With these choices the interior gradient of the
discrete energy with respect to a nodal value is exactly -dx*dy times the
compact five-point residual returned by :func:`el_residual`, so the discrete
gradient flow dissipates this exact functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import EnergyBreakdown, Grid2D, MField, ModelParams, QField

__all__ = [
    "DimensionalParams",
    "ResidualFields",
    "nondimensionalize",
    "bulk_potential_f",
    "total_energy",
    "energy_lower_bound",
    "el_residual",
    "bulk_potential_f_xi",
    "compute_k_xi",
    "k_xi_minimizer",
]


@dataclass(frozen=True)
class DimensionalParams:
    """Material constants of the unscaled model (SI-style units).

    A and alpha are the quadratic bulk coefficients and must be negative
    (ordered phases); C, beta_L quartic coefficients (> 0); gamma1 the
    coupling strength (>= 0, zero decouples Q from M), chi1 the
    susceptibility (> 0); mu a rescaled permeability; K, kappa elastic
    stiffnesses; L the domain edge length.
    """

    K: float
    kappa: float
    A: float
    C: float
    alpha: float
    beta_L: float
    gamma1: float
    chi1: float
    mu: float
    L: float

    def __post_init__(self) -> None:
        if not (self.A < 0.0):
            raise ValueError(f"A must be < 0, got {self.A}")
        if not (self.alpha < 0.0):
            raise ValueError(f"alpha must be < 0, got {self.alpha}")
        for name in ("K", "kappa", "C", "beta_L", "chi1", "mu", "L"):
            v = getattr(self, name)
            if not (v > 0.0):
                raise ValueError(f"{name} must be > 0, got {v}")
        if not (self.gamma1 >= 0.0):
            raise ValueError(f"gamma1 must be >= 0, got {self.gamma1}")


def nondimensionalize(d: DimensionalParams, *, eta1: float = 1.0, eta2: float = 1.0,
                      h_ext: tuple[float, float, float] = (0.0, 0.0, 0.0),
                      m3_enabled: bool = True) -> ModelParams:
    """Map material constants to the dimensionless coefficients.

    l1 = K/(2|A|L^2);  l2 = kappa/(|alpha| L^2);  xi = (C/|A|^2)(alpha^2/beta_L);
    c1 = (gamma1 mu/|A|) sqrt(C/(2|A|)) (|alpha|/beta_L);  c2 likewise with chi1;
    c3 = mu/|alpha|.  Friction and field are passed through.
    """
    abs_a = abs(d.A)
    abs_al = abs(d.alpha)
    root = math.sqrt(d.C / (2.0 * abs_a))
    return ModelParams(
        l1=d.K / (2.0 * abs_a * d.L**2),
        l2=d.kappa / (abs_al * d.L**2),
        xi=(d.C / abs_a**2) * (abs_al**2 / d.beta_L),
        c1=(d.gamma1 * d.mu / abs_a) * root * (abs_al / d.beta_L),
        c2=(d.chi1 * d.mu / abs_a) * root * (abs_al / d.beta_L),
        c3=d.mu / abs_al,
        eta1=eta1,
        eta2=eta2,
        h_ext=h_ext,
        m3_enabled=m3_enabled,
    )


def _qmm(q11, q12, u1, u2):
    """The contraction Q u . u for a planar vector u (used with M and H)."""
    return q11 * (u1**2 - u2**2) + 2.0 * q12 * u1 * u2


def bulk_potential_f(q, m, params: ModelParams):
    """Pointwise bulk potential f(Q, M) at a node (no field terms).

    q = (q11, q12), m = (m1, m2, m3); scalars or broadcastable arrays.
    f = (1/4)((1/2)|Q|^2 - 1)^2 + (xi/4)(|M|^2 - 1)^2 - (c1/2) QM.M.
    """
    q11, q12 = q
    m1, m2, m3 = m
    sigma = q11**2 + q12**2          # = (1/2)|Q|^2
    mu = m1**2 + m2**2 + m3**2
    return (
        0.25 * (sigma - 1.0) ** 2
        + 0.25 * params.xi * (mu - 1.0) ** 2
        - 0.5 * params.c1 * _qmm(q11, q12, m1, m2)
    )


def _trapezoid_weights(grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """1-D trapezoid weight factors along each axis (1/2 at the ends)."""
    tx = np.ones(grid.n_x)
    tx[0] = tx[-1] = 0.5
    ty = np.ones(grid.n_y)
    ty[0] = ty[-1] = 0.5
    return tx, ty


def _dirichlet_form(u: np.ndarray, grid: Grid2D, tx: np.ndarray, ty: np.ndarray) -> float:
    """Discrete integral of |grad u|^2: squared forward differences on edges,
    trapezoid-weighted in the transverse direction."""
    dx, dy = grid.delta_x, grid.delta_y
    ex = (u[1:, :] - u[:-1, :]) / dx          # x-edges, shape (n_x-1, n_y)
    ey = (u[:, 1:] - u[:, :-1]) / dy          # y-edges, shape (n_x, n_y-1)
    sx = float((ex**2 * ty[None, :]).sum())
    sy = float((ey**2 * tx[:, None]).sum())
    return (sx + sy) * dx * dy


def total_energy(q: QField, m: MField, params: ModelParams, grid: Grid2D) -> EnergyBreakdown:
    """Discrete total energy with a per-term breakdown."""
    for a in (q.q11, q.q12, m.m1, m.m2, m.m3):
        if a.shape != grid.shape:
            raise ValueError(f"field shape {a.shape} does not match grid {grid.shape}")
    tx, ty = _trapezoid_weights(grid)
    w = grid.delta_x * grid.delta_y * (tx[:, None] * ty[None, :])

    # (l1/2)|grad Q|^2 = l1*(|grad Q11|^2 + |grad Q12|^2)
    elastic_q = params.l1 * (
        _dirichlet_form(q.q11, grid, tx, ty) + _dirichlet_form(q.q12, grid, tx, ty)
    )
    elastic_m = 0.5 * params.xi * params.l2 * (
        _dirichlet_form(m.m1, grid, tx, ty)
        + _dirichlet_form(m.m2, grid, tx, ty)
        + _dirichlet_form(m.m3, grid, tx, ty)
    )

    sigma = q.order()
    mu = m.norm2()
    h1, h2, h3 = params.h_ext
    bulk_q = float((w * 0.25 * (sigma - 1.0) ** 2).sum())
    bulk_m = float((w * 0.25 * params.xi * (mu - 1.0) ** 2).sum())
    coupling_qm = float((w * (-0.5 * params.c1) * _qmm(q.q11, q.q12, m.m1, m.m2)).sum())
    stray = float((w * 0.5 * params.c3 * params.xi * m.m3**2).sum())
    coupling_qh = float((w * (-0.5 * params.c2) * _qmm(q.q11, q.q12, h1, h2)).sum())
    zeeman = float(
        (w * (-params.c3 * params.xi) * (m.m1 * h1 + m.m2 * h2 + m.m3 * h3)).sum()
    )

    parts = (elastic_q, elastic_m, bulk_q, bulk_m, coupling_qm, stray, coupling_qh, zeeman)
    return EnergyBreakdown(*parts, total=float(sum(parts)))


@dataclass
class ResidualFields:
    """Negative L2-gradient of the energy per unit area at interior nodes.

    r = 0 at equilibrium; r/eta is the gradient-flow velocity of each field.
    Boundary entries are zero by convention (Dirichlet data is fixed).
    """

    r_q11: np.ndarray
    r_q12: np.ndarray
    r_m1: np.ndarray
    r_m2: np.ndarray
    r_m3: np.ndarray

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.r_q11, self.r_q12, self.r_m1, self.r_m2, self.r_m3)


def _lap_interior(u: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """Compact five-point Laplacian on the interior slice."""
    return (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / dx**2 + (
        u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]
    ) / dy**2


def el_residual(q: QField, m: MField, params: ModelParams, grid: Grid2D) -> ResidualFields:
    """Equilibrium residuals of the five coupled fields.

    At interior nodes:
        r_q11 = 2 l1 lap(Q11) - Q11 (Q11^2+Q12^2-1) + (c1/2)(M1^2-M2^2) + (c2/2)(H1^2-H2^2)
        r_q12 = 2 l1 lap(Q12) - Q12 (Q11^2+Q12^2-1) + c1 M1 M2 + c2 H1 H2
        r_m1  = l2 xi lap(M1) - xi M1 (|M|^2-1) + c1 (Q11 M1 + Q12 M2) + c3 xi H1
        r_m2  = l2 xi lap(M2) - xi M2 (|M|^2-1) + c1 (Q12 M1 - Q11 M2) + c3 xi H2
        r_m3  = l2 xi lap(M3) - xi M3 (|M|^2-1) + c3 xi (H3 - M3)
    """
    for a in (q.q11, q.q12, m.m1, m.m2, m.m3):
        if a.shape != grid.shape:
            raise ValueError(f"field shape {a.shape} does not match grid {grid.shape}")
    dx, dy = grid.delta_x, grid.delta_y
    h1, h2, h3 = params.h_ext
    c1, c2, c3, xi, l1, l2 = params.c1, params.c2, params.c3, params.xi, params.l1, params.l2

    q11, q12 = q.q11[1:-1, 1:-1], q.q12[1:-1, 1:-1]
    m1, m2, m3 = m.m1[1:-1, 1:-1], m.m2[1:-1, 1:-1], m.m3[1:-1, 1:-1]
    sigma = q11**2 + q12**2
    mu = m1**2 + m2**2 + m3**2

    out = ResidualFields(*(np.zeros(grid.shape) for _ in range(5)))
    out.r_q11[1:-1, 1:-1] = (
        2.0 * l1 * _lap_interior(q.q11, dx, dy)
        - q11 * (sigma - 1.0)
        + 0.5 * c1 * (m1**2 - m2**2)
        + 0.5 * c2 * (h1**2 - h2**2)
    )
    out.r_q12[1:-1, 1:-1] = (
        2.0 * l1 * _lap_interior(q.q12, dx, dy)
        - q12 * (sigma - 1.0)
        + c1 * m1 * m2
        + c2 * h1 * h2
    )
    out.r_m1[1:-1, 1:-1] = (
        l2 * xi * _lap_interior(m.m1, dx, dy)
        - xi * m1 * (mu - 1.0)
        + c1 * (q11 * m1 + q12 * m2)
        + c3 * xi * h1
    )
    out.r_m2[1:-1, 1:-1] = (
        l2 * xi * _lap_interior(m.m2, dx, dy)
        - xi * m2 * (mu - 1.0)
        + c1 * (q12 * m1 - q11 * m2)
        + c3 * xi * h2
    )
    out.r_m3[1:-1, 1:-1] = (
        l2 * xi * _lap_interior(m.m3, dx, dy)
        - xi * m3 * (mu - 1.0)
        + c3 * xi * (h3 - m3)
    )
    return out


def energy_lower_bound(params: ModelParams, h_max: float) -> float:
    """Analytic constant below which no discrete energy value can fall.

    Derived pointwise from Young's inequality applied to the three indefinite
    couplings, with weights eps1 = 2*c1/xi (meeting the eps1 > c1/xi
    requirement), eps2 = eps3 = 1, then completing squares in s^2 = Q11^2+Q12^2
    and |M|^2.  The field-dependent penalties use the slightly looser
    coefficients (c3*xi/eps3)*h^2 and (c2/(2*eps2))*h^4, which can only lower
    the constant, so validity is preserved.  h_max must dominate |H_ext|.
    """
    if h_max < 0.0:
        raise ValueError("h_max must be >= 0")
    xi, c1, c2, c3 = params.xi, params.c1, params.c2, params.c3
    eps2 = eps3 = 1.0
    if c1 > 0.0:
        eps1 = 2.0 * c1 / xi
        a = 1.0 + 0.5 * (c1 * eps1 + c2 * eps2)      # vertex of the s^2 quadratic
        b = 0.25 * xi - c1 / (4.0 * eps1)            # = xi/8 with this eps1
    else:
        a = 1.0 + 0.5 * c2 * eps2
        b = 0.25 * xi
    c = 0.5 * xi * (1.0 + c3 * eps3)                 # linear coefficient in |M|^2
    g = 0.25 * (1.0 - a * a) + 0.25 * xi - c * c / (4.0 * b)
    area = 1.0
    return (g - (c3 * xi / eps3) * h_max**2 - (c2 / (2.0 * eps2)) * h_max**4) * area


def bulk_potential_f_xi(q, m, beta: float, xi: float):
    """Shifted bulk potential with coupling c1 = 2*beta*xi and infimum zero.

    f_xi = (1/4)(Q11^2+Q12^2-1)^2 + (xi/4)(|M|^2-1)^2
           - beta*xi*QM.M + k_xi(beta, xi).
    """
    if not (beta > 0.0 and xi > 0.0):
        raise ValueError("beta and xi must be > 0")
    q11, q12 = q
    m1, m2, m3 = m
    sigma = q11**2 + q12**2
    mu = m1**2 + m2**2 + m3**2
    return (
        0.25 * (sigma - 1.0) ** 2
        + 0.25 * xi * (mu - 1.0) ** 2
        - beta * xi * _qmm(q11, q12, m1, m2)
        + compute_k_xi(beta, xi)
    )


@lru_cache(maxsize=256)
def k_xi_minimizer(beta: float, xi: float) -> tuple[float, float, float]:
    """Minimizer of the unshifted f_xi over co-aligned planar amplitudes.

    Rotational symmetry reduces the five nodal degrees of freedom to the two
    amplitudes tau = |(Q11,Q12)| and gamma = |(M1,M2)| (the out-of-plane
    component only raises the potential at the minimizer, so M3 = 0);
    the coupling then contributes -beta*xi*tau*gamma^2 at co-alignment.
    Returns (tau, gamma, k_xi) with k_xi = -min f_xi >= 0, located by a dense
    amplitude scan refined with Newton iterations on the stationarity system.
    """
    if not (beta > 0.0 and xi > 0.0):
        raise ValueError("beta and xi must be > 0")

    def value(t, y):
        return 0.25 * (t**2 - 1.0) ** 2 + 0.25 * xi * (y**2 - 1.0) ** 2 - beta * xi * t * y**2

    # dense scan over a box that certainly contains the minimizer
    t_hi = 1.5 * math.sqrt(1.0 + 2.0 * beta**2 * xi + beta * xi) + 1.0
    y_hi = 1.5 * math.sqrt(1.0 + 2.0 * beta * t_hi) + 1.0
    ts = np.linspace(0.0, t_hi, 801)
    ys = np.linspace(0.0, y_hi, 801)
    vals = value(ts[:, None], ys[None, :])
    it, iy = np.unravel_index(np.argmin(vals), vals.shape)
    t, y = float(ts[it]), float(ys[iy])

    # Newton polish on grad f = 0
    for _ in range(60):
        gt = (t**2 - 1.0) * t - beta * xi * y**2
        gy = xi * (y**2 - 1.0) * y - 2.0 * beta * xi * t * y
        htt = 3.0 * t**2 - 1.0
        hyy = xi * (3.0 * y**2 - 1.0) - 2.0 * beta * xi * t
        hty = -2.0 * beta * xi * y
        det = htt * hyy - hty * hty
        if abs(det) < 1e-300:
            break
        dt = (gt * hyy - gy * hty) / det
        dy = (gy * htt - gt * hty) / det
        t, y = t - dt, y - dy
        if max(abs(dt), abs(dy)) < 1e-15:
            break
    return t, y, -value(t, y)


def compute_k_xi(beta: float, xi: float) -> float:
    """The constant shifting inf f_xi to zero; k_xi -> 0 as xi -> 0."""
    return k_xi_minimizer(beta, xi)[2]
