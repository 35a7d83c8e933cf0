"""Dirichlet boundary data and initial states.

Two families are provided: degree-k data, whose director winds k times
around the boundary (Q-vector 2k times), and the tangent-edge data used by
the validation example, with the director parallel to each square edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import FieldState, Grid2D, MField, QField

__all__ = [
    "BoundaryData",
    "theta_field",
    "degree_k_boundary",
    "degree_k_initial",
    "tangent_bc",
    "tangent_ic",
]

SQRT3 = math.sqrt(3.0)


@dataclass
class BoundaryData:
    """Prescribed values on the boundary index set.

    Arrays are full-grid shaped for convenient slicing, but only the four
    edge slices are defined; interior entries are NaN to make accidental
    interior reads loud.
    """

    grid: Grid2D
    q11_b: np.ndarray
    q12_b: np.ndarray
    m1_b: np.ndarray
    m2_b: np.ndarray
    m3_b: np.ndarray

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.q11_b, self.q12_b, self.m1_b, self.m2_b, self.m3_b)

    def apply(self, state: FieldState, *, zero_m3: bool = False) -> None:
        """Overwrite the boundary nodes of state with this data (bit-exact).

        zero_m3 pins the M3 edge values to 0 instead (used when the
        out-of-plane component is disabled).
        """
        for dst, src in zip(state.arrays(), self.arrays()):
            if src is self.m3_b and zero_m3:
                dst[0, :] = dst[-1, :] = 0.0
                dst[:, 0] = dst[:, -1] = 0.0
                continue
            dst[0, :] = src[0, :]
            dst[-1, :] = src[-1, :]
            dst[:, 0] = src[:, 0]
            dst[:, -1] = src[:, -1]

    def matches(self, state: FieldState, *, zero_m3: bool = False) -> bool:
        """True if the state's boundary nodes equal this data exactly."""
        for dst, src in zip(state.arrays(), self.arrays()):
            ref = np.zeros_like(src) if (src is self.m3_b and zero_m3) else src
            for sl in ((0, slice(None)), (-1, slice(None)), (slice(None), 0), (slice(None), -1)):
                if not np.array_equal(dst[sl], ref[sl]):
                    return False
        return True


def _edge_only(full: np.ndarray) -> np.ndarray:
    out = np.full_like(full, np.nan)
    out[0, :] = full[0, :]
    out[-1, :] = full[-1, :]
    out[:, 0] = full[:, 0]
    out[:, -1] = full[:, -1]
    return out


def theta_field(grid: Grid2D) -> np.ndarray:
    """Winding angle about the square center: atan2(y-1/2, x-1/2) - pi/2.

    At a node exactly at the center the atan2(0,0) = 0 convention applies,
    so theta = -pi/2 there; only initial data ever samples that value.
    """
    x, y = grid.coords()
    return np.arctan2(y - 0.5, x - 0.5) - 0.5 * np.pi


def degree_k_boundary(grid: Grid2D, k: int, m3_b: float = 0.0) -> BoundaryData:
    """Degree-k Dirichlet data: Q = (cos 2k theta, sin 2k theta),
    M = (sqrt3 cos k theta, sqrt3 sin k theta, m3_b) on boundary nodes."""
    if k < 1:
        raise ValueError(f"degree k must be >= 1, got {k}")
    th = theta_field(grid)
    return BoundaryData(
        grid,
        _edge_only(np.cos(2 * k * th)),
        _edge_only(np.sin(2 * k * th)),
        _edge_only(SQRT3 * np.cos(k * th)),
        _edge_only(SQRT3 * np.sin(k * th)),
        _edge_only(np.full(grid.shape, float(m3_b))),
    )


def degree_k_initial(grid: Grid2D, k: int) -> FieldState:
    """Full-grid initial state sharing the boundary's Q formula; M3 = sqrt3."""
    if k < 1:
        raise ValueError(f"degree k must be >= 1, got {k}")
    th = theta_field(grid)
    q = QField(np.cos(2 * k * th), np.sin(2 * k * th))
    m = MField(SQRT3 * np.cos(k * th), SQRT3 * np.sin(k * th), np.full(grid.shape, SQRT3))
    return FieldState(grid, q, m)


def tangent_bc(grid: Grid2D, m3_b: float = 0.0) -> BoundaryData:
    """Edge-wise constant data with the director tangent to each edge.

    x=0: Q=(-1,0), M=(0, 1, m3_b);   x=1: Q=(-1,0), M=(0,-1, m3_b);
    y=0: Q=( 1,0), M=(-1,0, m3_b);   y=1: Q=( 1,0), M=( 1,0, m3_b).
    The four corners take the x-edge values (x-edges win).
    """
    shape = grid.shape
    q11 = np.full(shape, np.nan)
    q12 = np.full(shape, np.nan)
    m1 = np.full(shape, np.nan)
    m2 = np.full(shape, np.nan)
    m3 = np.full(shape, np.nan)
    # y-edges first, then x-edges so corners resolve to the x-edge values
    q11[:, 0] = 1.0
    q12[:, 0] = 0.0
    m1[:, 0] = -1.0
    m2[:, 0] = 0.0
    q11[:, -1] = 1.0
    q12[:, -1] = 0.0
    m1[:, -1] = 1.0
    m2[:, -1] = 0.0
    q11[0, :] = -1.0
    q12[0, :] = 0.0
    m1[0, :] = 0.0
    m2[0, :] = 1.0
    q11[-1, :] = -1.0
    q12[-1, :] = 0.0
    m1[-1, :] = 0.0
    m2[-1, :] = -1.0
    for edge in ((0, slice(None)), (-1, slice(None)), (slice(None), 0), (slice(None), -1)):
        m3[edge] = float(m3_b)
    return BoundaryData(grid, q11, q12, m1, m2, m3)


def tangent_ic(grid: Grid2D, c1: float, m3_i: float = 0.0) -> FieldState:
    """Constant initial guess Q = (c1, c1), M = (c1, c1, m3_i) on all nodes.

    The reuse of the coupling constant as the seed amplitude is deliberate
    and configurable through the c1 argument.
    """
    shape = grid.shape
    q = QField(np.full(shape, float(c1)), np.full(shape, float(c1)))
    m = MField(np.full(shape, float(c1)), np.full(shape, float(c1)), np.full(shape, float(m3_i)))
    return FieldState(grid, q, m)
