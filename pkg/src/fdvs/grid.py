"""Uniform periodic 2-D grids, scalar fields, stencils, and polar resampling.

The box is [-L, L)^2 with nx points per axis, spacing h = 2L/nx; index (i, j)
sits at (-L + i h, -L + j h) with i along axis 0.  All derivative operators
are 4th-order centered differences with periodic wrap.
"""
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import NonFinite

__all__ = ["Grid2D", "ScalarField", "PolarSamples", "dx", "dxx", "to_polar",
           "d1", "d2", "laplacian", "corrupted_stencils"]


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic Cartesian grid on [-L, L)^2."""

    nx: int
    L: float

    def __post_init__(self):
        if self.nx % 2 != 0 or self.nx < 16:
            raise ValueError(f"nx must be even and >= 16, got {self.nx}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.nx

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.nx)

    def meshgrid(self):
        """Coordinate arrays X, Y with X varying along axis 0."""
        c = self.axis()
        return np.meshgrid(c, c, indexing="ij")

    def radius(self) -> np.ndarray:
        X, Y = self.meshgrid()
        return np.hypot(X, Y)


@dataclass(frozen=True)
class ScalarField:
    """A real scalar sampled on a Grid2D; values must stay finite."""

    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nx, self.grid.nx):
            raise ValueError(f"values shape {v.shape} does not match grid "
                             f"({self.grid.nx}, {self.grid.nx})")
        if not np.all(np.isfinite(v)):
            raise NonFinite("ScalarField contains NaN or Inf")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class PolarSamples:
    """Field values resampled at radii r_k = (k + 1/2) dr and n_theta angles."""

    radii: np.ndarray
    n_theta: int
    values: np.ndarray  # shape (n_r, n_theta)

    @property
    def dr(self) -> float:
        return float(self.radii[1] - self.radii[0]) if len(self.radii) > 1 \
            else float(2.0 * self.radii[0])


# 4th-order centered first derivative: (f-2 - 8 f-1 + 8 f+1 - f+2) / (12 h)
# Negative-control hook for the check suites: a nonzero value is added to
# one d1 stencil coefficient, which must make every convergence-order gate
# fail.  Never set outside corrupted_stencils().
_STENCIL_CORRUPTION = 0.0


@contextmanager
def corrupted_stencils(amount: float = 0.05):
    global _STENCIL_CORRUPTION
    _STENCIL_CORRUPTION = float(amount)
    try:
        yield
    finally:
        _STENCIL_CORRUPTION = 0.0


def d1(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """First derivative along axis (0 or 1) with periodic wrap, 4th order."""
    r = lambda s: np.roll(values, -s, axis=axis)
    c = 8.0 + _STENCIL_CORRUPTION
    return (r(-2) - c * r(-1) + c * r(1) - r(2)) / (12.0 * h)


# 4th-order centered second derivative:
# (-f-2 + 16 f-1 - 30 f0 + 16 f+1 - f+2) / (12 h^2)
def d2(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Pure second derivative along axis with periodic wrap, 4th order."""
    r = lambda s: np.roll(values, -s, axis=axis)
    return (-r(-2) + 16.0 * r(-1) - 30.0 * values + 16.0 * r(1) - r(2)) \
        / (12.0 * h * h)


def laplacian(values: np.ndarray, h: float) -> np.ndarray:
    return d2(values, h, 0) + d2(values, h, 1)


def dx(f: ScalarField, axis: int) -> ScalarField:
    """Discrete d/dx_axis (axis in {1, 2}); exactly linear in f."""
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    return ScalarField(f.grid, d1(f.values, f.grid.h, axis - 1))


def dxx(f: ScalarField, axis_a: int, axis_b: int) -> ScalarField:
    """Discrete d^2/(dx_a dx_b); symmetric in (axis_a, axis_b) by construction.

    Mixed derivatives compose the canonical first-derivative stencil in a
    fixed axis order so dxx(f, 1, 2) and dxx(f, 2, 1) are the same array.
    """
    for a in (axis_a, axis_b):
        if a not in (1, 2):
            raise ValueError(f"axis must be 1 or 2, got {a}")
    h = f.grid.h
    if axis_a == axis_b:
        return ScalarField(f.grid, d2(f.values, h, axis_a - 1))
    lo, hi = min(axis_a, axis_b) - 1, max(axis_a, axis_b) - 1
    return ScalarField(f.grid, d1(d1(f.values, h, lo), h, hi))


def to_polar(f: ScalarField, n_theta: int, dr: float = None) -> PolarSamples:
    """Bilinear resample of f at (r_k cos theta_j, r_k sin theta_j), r_k <= L.

    Radii are cell midpoints r_k = (k + 1/2) dr, with dr defaulting to the
    grid spacing.  Interpolation wraps periodically, consistent with the
    grid topology; for the compactly supported fields used here the
    boundary values are ~0 either way.
    """
    if n_theta < 8:
        raise ValueError(f"n_theta must be >= 8, got {n_theta}")
    g = f.grid
    if dr is None:
        dr = g.h
    if dr > g.h * (1 + 1e-12):
        raise ValueError(f"dr must be <= grid spacing {g.h}, got {dr}")
    n_r = int(np.floor(g.L / dr - 0.5)) + 1
    radii = (np.arange(n_r) + 0.5) * dr
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    R, T = np.meshgrid(radii, theta, indexing="ij")
    px = (R * np.cos(T) + g.L) / g.h  # fractional index along axis 0
    py = (R * np.sin(T) + g.L) / g.h
    vals = map_coordinates(f.values, [px, py], order=1, mode="grid-wrap")
    return PolarSamples(radii=radii, n_theta=n_theta, values=vals)
