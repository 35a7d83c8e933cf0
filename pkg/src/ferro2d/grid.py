"""Uniform grid on the unit square and the node-indexed field containers.

Arrays are dense, row-major, indexed ``[i, j]`` with node coordinates
``(x_i, y_j) = (i*dx, j*dy)``.  The boundary index set is ``i in {0, n_x-1}``
or ``j in {0, n_y-1}``; the interior is its complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid2D",
    "QField",
    "MField",
    "FieldState",
    "ModelParams",
    "EnergyBreakdown",
    "make_grid",
    "director_from_q",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform node-centered grid spanning [0,1] x [0,1], boundary included."""

    n_x: int
    n_y: int
    delta_x: float
    delta_y: float

    def __post_init__(self) -> None:
        if self.n_x < 3 or self.n_y < 3:
            raise ValueError("grid needs at least 3 nodes per axis (one interior layer)")
        if abs((self.n_x - 1) * self.delta_x - 1.0) > 1e-12:
            raise ValueError("(n_x - 1) * delta_x must equal 1 (unit square)")
        if abs((self.n_y - 1) * self.delta_y - 1.0) > 1e-12:
            raise ValueError("(n_y - 1) * delta_y must equal 1 (unit square)")
        if abs(self.delta_x - self.delta_y) > 1e-15:
            raise ValueError("anisotropic grids are not supported (delta_x != delta_y)")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_y)

    def x_nodes(self) -> np.ndarray:
        return np.arange(self.n_x) * self.delta_x

    def y_nodes(self) -> np.ndarray:
        return np.arange(self.n_y) * self.delta_y

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Full coordinate arrays (X, Y), each of shape (n_x, n_y)."""
        return np.meshgrid(self.x_nodes(), self.y_nodes(), indexing="ij")

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :] = mask[-1, :] = True
        mask[:, 0] = mask[:, -1] = True
        return mask

    def boundary_distance(self) -> np.ndarray:
        """Distance of each node to the nearest edge of the square."""
        x, y = self.coords()
        return np.minimum.reduce([x, 1.0 - x, y, 1.0 - y])


def make_grid(n: int) -> Grid2D:
    """Uniform n x n grid on the unit square with dx = dy = 1/(n-1)."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    d = 1.0 / (n - 1)
    return Grid2D(n_x=n, n_y=n, delta_x=d, delta_y=d)


def _as_grid_array(a, grid: Grid2D) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.shape != grid.shape:
        raise ValueError(f"field shape {arr.shape} does not match grid {grid.shape}")
    return arr


@dataclass
class QField:
    """Reduced tensor order parameter: two degrees of freedom per node.

    The full tensor is recovered as Q22 = -Q11, Q21 = Q12 with zero third
    row/column, so |Q|^2 = 2*(Q11^2 + Q12^2).
    """

    q11: np.ndarray
    q12: np.ndarray

    def copy(self) -> "QField":
        return QField(self.q11.copy(), self.q12.copy())

    def order(self) -> np.ndarray:
        """Nodal value of (1/2)|Q|^2 = Q11^2 + Q12^2."""
        return self.q11**2 + self.q12**2


@dataclass
class MField:
    """Magnetization: three scalar components per node."""

    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray

    def copy(self) -> "MField":
        return MField(self.m1.copy(), self.m2.copy(), self.m3.copy())

    def norm2(self) -> np.ndarray:
        """Nodal value of |M|^2 = M1^2 + M2^2 + M3^2."""
        return self.m1**2 + self.m2**2 + self.m3**2


@dataclass
class FieldState:
    """A (Q, M) pair living on a grid; the solver's unit of state."""

    grid: Grid2D
    q: QField
    m: MField

    def __post_init__(self) -> None:
        for a in (self.q.q11, self.q.q12, self.m.m1, self.m.m2, self.m.m3):
            _as_grid_array(a, self.grid)

    def copy(self) -> "FieldState":
        return FieldState(self.grid, self.q.copy(), self.m.copy())

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.q.q11, self.q.q12, self.m.m1, self.m.m2, self.m.m3)


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model coefficients.

    l1, l2    elastic constants (> 0); the config layer accepts the doubled
              convention l1_prime = 2*l1 and converts on parse.
    c1        nemato-magnetic coupling (>= 0)
    c2        Q / external-field coupling (>= 0)
    c3        stray-field / Zeeman coefficient (>= 0)
    xi        magnetic-to-nematic energy ratio (> 0)
    eta1/eta2 friction coefficients of the gradient flow (> 0)
    h_ext     constant external field (H1, H2, H3)
    m3_enabled  when False, M3 is held identically zero by the solver
              (out-of-plane component and hence the stray term switched off)
    """

    l1: float
    l2: float
    c1: float
    c2: float
    c3: float
    xi: float
    eta1: float
    eta2: float
    h_ext: tuple[float, float, float] = (0.0, 0.0, 0.0)
    m3_enabled: bool = True

    def __post_init__(self) -> None:
        for name in ("l1", "l2", "xi", "eta1", "eta2"):
            v = getattr(self, name)
            if not (v > 0.0):
                raise ValueError(f"{name} must be > 0, got {v}")
        for name in ("c1", "c2", "c3"):
            v = getattr(self, name)
            if not (v >= 0.0):
                raise ValueError(f"{name} must be >= 0, got {v}")
        if len(self.h_ext) != 3:
            raise ValueError("h_ext must have three components")
        object.__setattr__(self, "h_ext", tuple(float(h) for h in self.h_ext))


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-term decomposition of the discrete energy; total is their sum."""

    elastic_q: float
    elastic_m: float
    bulk_q: float
    bulk_m: float
    coupling_qm: float
    stray: float
    coupling_qh: float
    zeeman: float
    total: float

    TERMS = (
        "elastic_q",
        "elastic_m",
        "bulk_q",
        "bulk_m",
        "coupling_qm",
        "stray",
        "coupling_qh",
        "zeeman",
    )

    def parts_sum(self) -> float:
        return float(sum(getattr(self, t) for t in self.TERMS))


def director_from_q(q: QField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decompose Q into scalar order s and director angle phi.

    Returns (s, phi, defect) with s = sqrt(Q11^2 + Q12^2),
    phi = 0.5*atan2(Q12, Q11), and defect marking nodes where s == 0
    (the director is undefined there; the angle is reported as 0).
    Reconstruction Q11 = s*cos(2*phi), Q12 = s*sin(2*phi) holds to 1e-12.
    """
    s = np.sqrt(q.q11**2 + q.q12**2)
    phi = 0.5 * np.arctan2(q.q12, q.q11)
    defect = s == 0.0
    phi = np.where(defect, 0.0, phi)
    return s, phi, defect
