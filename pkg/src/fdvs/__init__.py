"""Numerical laboratory for the evolutionary Faddeev model in 2+1 D.

Sphere-valued waves in geodesic normal coordinates: a verified
quasi-linear solver (grid, chart, rhs, integrator) plus the analytic
toolkit realized as computable diagnostics (vector fields and null
forms, weighted norms, spectral linear-wave oracles, decay fits).
"""
from .errors import AmplitudeTooLarge, ChartExit, ConfigError, EmptyWindow, \
    FdvsError, NonFinite, PrincipalDegenerate, SupportViolation, WrapAround
from .grid import Grid2D, PolarSamples, ScalarField, dx, dxx, to_polar
from .chart import FieldState, InitialDataSpec, SphereMap, chart_margin, \
    make_initial_state, reconstruct_sphere
from .rhs import DerivativeBundle, PrincipalSystem, assemble, \
    bundle_derivatives, residual_faddeev3, solve_accel
from .integrator import RunConfig, Trajectory, run, step
from .gamma_null import GAMMA_OPS, GammaOp, Ladder, SampleField, \
    SpacetimeSample, apply_gamma, box_node, check_commutators, \
    check_lemd11_identity, check_propa12, ladder_from_fn, null_Q, null_Qab
from .norms import NormSpec, SeriesRecord, check_hardy, gamma_norm, norm_pq
from .linear_wave import SpectralState, check_b112, check_thmb22, \
    evolve_duhamel, evolve_homogeneous, homogeneous_state
from .diagnostics import DecayFit, EnergyBreakdown, energy, epsilon_sweep, \
    fit_decay
from .io import read_diagnostics_csv, read_snapshot, write_diagnostics_csv, \
    write_snapshot
from .config import load_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTooLarge", "ChartExit", "ConfigError", "EmptyWindow",
    "FdvsError", "NonFinite", "PrincipalDegenerate", "SupportViolation",
    "WrapAround",
    "Grid2D", "PolarSamples", "ScalarField", "dx", "dxx", "to_polar",
    "FieldState", "InitialDataSpec", "SphereMap", "chart_margin",
    "make_initial_state", "reconstruct_sphere",
    "DerivativeBundle", "PrincipalSystem", "assemble", "bundle_derivatives",
    "residual_faddeev3", "solve_accel",
    "RunConfig", "Trajectory", "run", "step",
    "GAMMA_OPS", "GammaOp", "Ladder", "SampleField", "SpacetimeSample",
    "apply_gamma", "box_node", "check_commutators", "check_lemd11_identity",
    "check_propa12", "ladder_from_fn", "null_Q", "null_Qab",
    "NormSpec", "SeriesRecord", "check_hardy", "gamma_norm", "norm_pq",
    "SpectralState", "check_b112", "check_thmb22", "evolve_duhamel",
    "evolve_homogeneous", "homogeneous_state",
    "DecayFit", "EnergyBreakdown", "energy", "epsilon_sweep", "fit_decay",
    "read_diagnostics_csv", "read_snapshot", "write_diagnostics_csv",
    "write_snapshot",
    "load_config", "parse_config",
    "__version__",
]
