"""Geodesic-normal-coordinate representation of sphere-valued maps.

The chart stores (n1, n2) near the north pole; the third component is
reconstructed as n3 = sqrt(1 - n1^2 - n2^2) (only the + branch is supported).
Chart validity means max(n1^2 + n2^2) <= r_max^2 with r_max = 0.9 by default.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import AmplitudeTooLarge, ChartExit
from .grid import Grid2D, ScalarField

__all__ = ["DEFAULT_R_MAX", "FieldState", "SphereMap", "InitialDataSpec",
           "make_initial_state", "reconstruct_sphere", "chart_margin",
           "check_chart", "PROFILE_TAIL"]

DEFAULT_R_MAX = 0.9
# amplitude below which a profile is treated as zero when recording R0
PROFILE_TAIL = 1e-14


@dataclass(frozen=True)
class FieldState:
    """Chart fields (n1, n2) and their time derivatives (m1, m2) at time t."""

    grid: Grid2D
    n1: ScalarField
    n2: ScalarField
    m1: ScalarField
    m2: ScalarField
    t: float
    r_max: float = DEFAULT_R_MAX

    def __post_init__(self):
        for f in (self.n1, self.n2, self.m1, self.m2):
            if f.grid != self.grid:
                raise ValueError("all fields must share the state's grid")

    def arrays(self):
        return (self.n1.values, self.n2.values, self.m1.values, self.m2.values)


@dataclass(frozen=True)
class SphereMap:
    """Unit-sphere-valued map: three components with |n| = 1 pointwise."""

    grid: Grid2D
    n1: ScalarField
    n2: ScalarField
    n3: ScalarField


@dataclass(frozen=True)
class InitialDataSpec:
    """Gaussian bump data: n_a = eps exp(-|x - c_a|^2 / (2 sigma^2)),
    m_a = eps v_a exp(-|x - c_a|^2 / (2 sigma^2)).

    epsilon in [0, 0.3]; centers gives one center per chart component;
    velocity holds the dimensionless multipliers (v1, v2).
    """

    epsilon: float
    sigma: float
    centers: tuple = ((0.0, 0.0), (0.0, 0.0))
    velocity: tuple = (0.0, 0.0)
    profile: str = "gaussian"

    def __post_init__(self):
        if not (0.0 <= self.epsilon <= 0.3):
            raise ValueError(f"epsilon must be in [0, 0.3], got {self.epsilon}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.profile != "gaussian":
            raise ValueError(f"unknown profile {self.profile!r}")
        if len(self.centers) != 2 or any(len(c) != 2 for c in self.centers):
            raise ValueError("centers must be two (x, y) pairs")
        if len(self.velocity) != 2:
            raise ValueError("velocity must be two multipliers")

    def support_radius(self) -> float:
        """Radius R0 beyond which every profile value is below 1e-14.

        Gaussians are not compactly supported; R0 at the 1e-14 tail is
        recorded and treated as the support radius by the wrap guard.
        """
        amp = self.epsilon * max(1.0, *(abs(v) for v in self.velocity))
        if amp <= PROFILE_TAIL:
            return 0.0
        r = self.sigma * np.sqrt(2.0 * np.log(amp / PROFILE_TAIL))
        off = max(np.hypot(*c) for c in self.centers)
        return float(r + off)


def _bump(spec: InitialDataSpec, grid: Grid2D, center) -> np.ndarray:
    X, Y = grid.meshgrid()
    r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
    return np.exp(-r2 / (2.0 * spec.sigma ** 2))


def make_initial_state(spec: InitialDataSpec, grid: Grid2D,
                       r_max: float = DEFAULT_R_MAX) -> FieldState:
    """Synthesize the t = 0 chart state from an InitialDataSpec."""
    if spec.sigma <= 2.0 * grid.h:
        raise ValueError(f"sigma must exceed 2 h = {2 * grid.h:g}, "
                         f"got {spec.sigma}")
    g1 = _bump(spec, grid, spec.centers[0])
    g2 = _bump(spec, grid, spec.centers[1])
    n1 = spec.epsilon * g1
    n2 = spec.epsilon * g2
    m1 = spec.epsilon * spec.velocity[0] * g1
    m2 = spec.epsilon * spec.velocity[1] * g2
    if np.max(n1 ** 2 + n2 ** 2) > r_max ** 2:
        raise AmplitudeTooLarge(
            f"initial data exceeds chart radius r_max = {r_max}")
    sf = lambda v: ScalarField(grid, v)
    return FieldState(grid, sf(n1), sf(n2), sf(m1), sf(m2), t=0.0,
                      r_max=r_max)


def chart_margin(state: FieldState) -> float:
    """r_max^2 - max(n1^2 + n2^2); negative means the chart was left."""
    s = np.max(state.n1.values ** 2 + state.n2.values ** 2)
    return float(state.r_max ** 2 - s)


def check_chart(state: FieldState) -> None:
    m = chart_margin(state)
    if m < 0.0:
        raise ChartExit(f"chart margin {m:.3e} < 0 at t = {state.t:g}")


def reconstruct_sphere(state: FieldState) -> SphereMap:
    """Rebuild the full sphere-valued map (n1, n2, sqrt(1 - n1^2 - n2^2))."""
    check_chart(state)
    v1, v2 = state.n1.values, state.n2.values
    n3 = np.sqrt(1.0 - v1 ** 2 - v2 ** 2)
    return SphereMap(state.grid, state.n1, state.n2,
                     ScalarField(state.grid, n3))
