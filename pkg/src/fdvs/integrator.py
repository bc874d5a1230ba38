"""Method-of-lines evolution of the chart system with classical RK4.

The first-order form evolves (n1, n2, m1, m2) with dt n = m and
dt m = A^-1 R from the rhs module.  The step size is cfl * h; the domain
half-width must satisfy the wrap-around guard L >= R0 + 1.1 t_final + 2
so that the periodic boundary never feeds signal back into the support
(waves travel at speed <= 1; the 1.1 factor plus the +2 pad absorb the
Gaussian tails and stencil width).

Failure modes (chart exit, principal-matrix degeneracy, non-finite
values) terminate the run and are recorded on the Trajectory as a status
instead of escaping to the caller.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .chart import DEFAULT_R_MAX, FieldState, InitialDataSpec, \
    make_initial_state
from .errors import ChartExit, ConfigError, NonFinite, PrincipalDegenerate
from .grid import Grid2D, ScalarField
from .rhs import assemble, solve_accel
from . import diagnostics

__all__ = ["COMPLETED", "CHART_EXIT", "PRINCIPAL_DEGENERATE", "NON_FINITE",
           "RunConfig", "Trajectory", "step", "run", "wrap_guard_halfwidth"]

COMPLETED = "Completed"
CHART_EXIT = "ChartExit"
PRINCIPAL_DEGENERATE = "PrincipalDegenerate"
NON_FINITE = "NonFinite"


def wrap_guard_halfwidth(R0: float, t_final: float) -> float:
    """Smallest admissible box half-width for a run to time t_final."""
    return R0 + 1.1 * t_final + 2.0


@dataclass(frozen=True)
class RunConfig:
    """Run parameters; L = None computes the minimal guarded half-width."""

    nx: int
    t_final: float
    data: InitialDataSpec
    L: float = None
    cfl: float = 0.5
    snapshot_stride: int = 0
    diag_stride: int = 10
    r_max: float = DEFAULT_R_MAX
    norms: tuple = ()
    fit_window: tuple = (10.0, 40.0)
    # recorded for provenance; the pipeline is deterministic and draws
    # no random numbers
    seed: int = 0

    def __post_init__(self):
        if self.t_final <= 0.0:
            raise ConfigError(f"run.t_final: must be positive, "
                              f"got {self.t_final}")
        if not (0.0 < self.cfl <= 1.0):
            raise ConfigError(f"run.cfl: must be in (0, 1], got {self.cfl}")
        if self.diag_stride < 1:
            raise ConfigError(f"output.diag_stride: must be >= 1, "
                              f"got {self.diag_stride}")
        if self.snapshot_stride < 0:
            raise ConfigError(f"output.snapshot_stride: must be >= 0, "
                              f"got {self.snapshot_stride}")
        if not (0.0 < self.r_max < 1.0):
            raise ConfigError(f"run.r_max: must be in (0, 1), "
                              f"got {self.r_max}")
        guard = wrap_guard_halfwidth(self.data.support_radius(), self.t_final)
        if self.L is None:
            object.__setattr__(self, "L", guard)
        elif self.L < guard - 1e-9:
            raise ConfigError(
                f"grid.L: {self.L} violates the wrap-around guard; need "
                f"L >= R0 + 1.1 t_final + 2 = {guard:.6g}")

    def grid(self) -> Grid2D:
        return Grid2D(nx=self.nx, L=self.L)

    def dt(self) -> float:
        return self.cfl * self.grid().h


@dataclass
class Trajectory:
    """Evolution record: diagnostics series, snapshots, termination status."""

    config: RunConfig
    status: str
    message: str
    series: list
    snapshots: list
    final_state: FieldState

    def times(self):
        return np.array([rec.t for rec in self.series])

    def column(self, name: str):
        return np.array([rec.values[name] for rec in self.series])


def _rhs_eval(arrays, t, grid, r_max):
    n1, n2, m1, m2 = arrays
    st = FieldState(grid, ScalarField(grid, n1), ScalarField(grid, n2),
                    ScalarField(grid, m1), ScalarField(grid, m2), t=t,
                    r_max=r_max)
    a1, a2 = solve_accel(assemble(st))
    return (m1, m2, a1.values, a2.values)


def step(state: FieldState, dt: float) -> FieldState:
    """One classical RK4 step of the full quasi-linear system."""
    g, t, rm = state.grid, state.t, state.r_max
    y0 = state.arrays()
    k1 = _rhs_eval(y0, t, g, rm)
    y = tuple(a + 0.5 * dt * b for a, b in zip(y0, k1))
    k2 = _rhs_eval(y, t + 0.5 * dt, g, rm)
    y = tuple(a + 0.5 * dt * b for a, b in zip(y0, k2))
    k3 = _rhs_eval(y, t + 0.5 * dt, g, rm)
    y = tuple(a + dt * b for a, b in zip(y0, k3))
    k4 = _rhs_eval(y, t + dt, g, rm)
    out = tuple(a + (dt / 6.0) * (p + 2.0 * q + 2.0 * r + s)
                for a, p, q, r, s in zip(y0, k1, k2, k3, k4))
    return FieldState(g, ScalarField(g, out[0]), ScalarField(g, out[1]),
                      ScalarField(g, out[2]), ScalarField(g, out[3]),
                      t=t + dt, r_max=rm)


def run(config: RunConfig, progress=None) -> Trajectory:
    """Evolve from the configured data until t_final or a failure status.

    Diagnostics rows are recorded every diag_stride steps (and at the
    final time); snapshots every snapshot_stride steps when the stride is
    positive.  progress, if given, is called as progress(k, n_steps, t).
    """
    grid = config.grid()
    dt = config.dt()
    n_steps = int(math.ceil(config.t_final / dt - 1e-9))
    series, snapshots = [], []
    status, message = COMPLETED, ""
    state = None
    try:
        state = make_initial_state(config.data, grid, r_max=config.r_max)
        for k in range(n_steps + 1):
            last = (k == n_steps)
            if k % config.diag_stride == 0 or last:
                series.append(diagnostics.diagnostic_row(
                    state, step, dt, extra_norms=config.norms))
            if config.snapshot_stride > 0 and \
                    (k % config.snapshot_stride == 0 or last):
                snapshots.append(state)
            if progress is not None:
                progress(k, n_steps, state.t)
            if not last:
                state = step(state, dt)
    except ChartExit as e:
        status, message = CHART_EXIT, str(e)
    except PrincipalDegenerate as e:
        status, message = PRINCIPAL_DEGENERATE, str(e)
    except NonFinite as e:
        status, message = NON_FINITE, str(e)
    return Trajectory(config=config, status=status, message=message,
                      series=series, snapshots=snapshots, final_state=state)
