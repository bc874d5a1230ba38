"""Energy, decay fits, per-step diagnostics rows, and epsilon sweeps.

The energy is the Noether charge of time translation for the sigma-model
Lagrangian with the quartic coupling: all four parts are nonnegative,

    E = integral of  1/2 |dt n|^2 + 1/2 |grad n|^2
        + 1/2 sum_i |dt n ^ d_i n|^2 + 1/2 |d_1 n ^ d_2 n|^2,

evaluated on the reconstructed sphere map with chain-rule dt n3 and
Riemann-sum quadrature (see docs/equations.md for the derivation).
Conservation along completed trajectories is the main integrator
fidelity metric.

Decay fits are least squares of log(value) against log(1 + t); the
epsilon sweep reruns one configuration over an amplitude list and
regresses amplitudes and fitted exponents against epsilon.
"""
import math
from dataclasses import dataclass, replace

import numpy as np

from .chart import FieldState, chart_margin
from .errors import EmptyWindow
from .gamma_null import SpacetimeSample
from .grid import ScalarField, laplacian
from .norms import NormSpec, SeriesRecord, gamma_norm, norm_pq
from .rhs import _sphere_jets, assemble, solve_accel

__all__ = ["EnergyBreakdown", "DecayFit", "energy", "fit_decay",
           "diagnostic_row", "epsilon_sweep", "SweepReport", "CSV_COLUMNS"]

CSV_COLUMNS = ("t", "Linf_s0", "L2_G1", "L2_G1_dn", "L43_int", "L12_ext",
               "energy", "chart_margin", "residual_f3")


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    gradient: float
    skyrme_t: float
    skyrme_s: float

    @property
    def total(self) -> float:
        return self.kinetic + self.gradient + self.skyrme_t + self.skyrme_s


def _sq3(v):
    return v[0] ** 2 + v[1] ** 2 + v[2] ** 2


def energy(state: FieldState) -> EnergyBreakdown:
    """Conserved energy of the sphere-valued map, split into its parts."""
    n, dtn, dxn, dyn = _sphere_jets(state)
    cell = state.grid.h ** 2

    def cross_sq(u, v):
        c0 = u[1] * v[2] - u[2] * v[1]
        c1 = u[2] * v[0] - u[0] * v[2]
        c2 = u[0] * v[1] - u[1] * v[0]
        return c0 * c0 + c1 * c1 + c2 * c2

    kin = 0.5 * cell * float(np.sum(_sq3(dtn)))
    grad = 0.5 * cell * float(np.sum(_sq3(dxn) + _sq3(dyn)))
    sk_t = 0.5 * cell * float(np.sum(cross_sq(dtn, dxn) + cross_sq(dtn, dyn)))
    sk_s = 0.5 * cell * float(np.sum(cross_sq(dxn, dyn)))
    return EnergyBreakdown(kin, grad, sk_t, sk_s)


@dataclass(frozen=True)
class DecayFit:
    """Fit value ~ amplitude * (1 + t)^gamma over [t0, t1]."""

    t0: float
    t1: float
    gamma: float
    amplitude: float
    rms: float
    n_samples: int


def fit_decay(series, column: str, window=(10.0, 40.0)) -> DecayFit:
    """Least-squares power-law fit of a diagnostics column.

    Requires t1 >= 2 t0 and at least 10 strictly positive samples in the
    window; nonpositive samples are excluded.
    """
    t0, t1 = float(window[0]), float(window[1])
    if t1 < 2.0 * t0:
        raise ValueError(f"fit window needs t1 >= 2 t0, got [{t0}, {t1}]")
    ts, vs = [], []
    for rec in series:
        v = rec.values[column]
        if t0 <= rec.t <= t1 and v > 0.0:
            ts.append(rec.t)
            vs.append(v)
    if len(ts) < 10:
        raise EmptyWindow(f"window [{t0}, {t1}] holds {len(ts)} positive "
                          f"samples of {column!r}, need >= 10")
    x = np.log1p(np.array(ts))
    y = np.log(np.array(vs))
    gamma, logc = np.polyfit(x, y, 1)
    resid = y - (gamma * x + logc)
    return DecayFit(t0=t0, t1=t1, gamma=float(gamma),
                    amplitude=float(np.exp(logc)),
                    rms=float(np.sqrt(np.mean(resid ** 2))),
                    n_samples=len(ts))


def diagnostic_row(state: FieldState, stepper, dt: float,
                   extra_norms=()) -> SeriesRecord:
    """One diagnostics record at the state's time.

    stepper(state, +-dt) supplies the neighbor states for the sphere-form
    residual; all other entries come from the state and its solved
    acceleration.
    """
    g, t = state.grid, state.t
    sys = assemble(state)
    a1, a2 = solve_accel(sys)
    sample = SpacetimeSample(cur=state, accel=(a1.values, a2.values))

    vals = {}
    vals["Linf_s0"] = gamma_norm(sample, NormSpec("inf", "inf", 0))
    vals["L2_G1"] = gamma_norm(sample, NormSpec(2, 2, 1))
    dn_nodes = []
    for comp in ("1", "2"):
        base = sample.node("n" + comp)
        dn_nodes += [sample.node("m" + comp), base.dx(1), base.dx(2)]
    vals["L2_G1_dn"] = gamma_norm(sample, NormSpec(2, 2, 1),
                                  fields=tuple(dn_nodes))
    # the trajectory's own wave-equation source f = box n = accel - lap n
    f1 = ScalarField(g, a1.values - laplacian(state.n1.values, g.h))
    f2 = ScalarField(g, a2.values - laplacian(state.n2.values, g.h))
    vals["L43_int"] = (norm_pq(f1, 4.0 / 3.0, 4.0 / 3.0, t, "Interior")
                       + norm_pq(f2, 4.0 / 3.0, 4.0 / 3.0, t, "Interior"))
    vals["L12_ext"] = (norm_pq(f1, 1, 2, t, "Exterior")
                       + norm_pq(f2, 1, 2, t, "Exterior"))
    vals["energy"] = energy(state).total
    vals["chart_margin"] = chart_margin(state)
    from .rhs import residual_faddeev3
    prev = stepper(state, -dt)
    nxt = stepper(state, dt)
    vals["residual_f3"] = float(np.max(
        residual_faddeev3((prev, state, nxt)).values))
    for spec in extra_norms:
        vals[spec.label()] = gamma_norm(sample, spec)
    return SeriesRecord(t=t, values=vals)


@dataclass
class SweepReport:
    """Epsilon-scaling study: per-amplitude rows plus cross-run slopes."""

    rows: list
    amp_slope_linf: float
    amp_slope_l2: float
    ok: bool

    def text(self) -> str:
        lines = ["epsilon    status      gamma_linf  gamma_l2_n  "
                 "gamma_l2_dn  linf_final"]
        for r in self.rows:
            def f(v):
                return "    --    " if v is None else f"{v:10.4f}"
            lines.append(f"{r['epsilon']:<10.4g} {r['status']:<11} "
                         f"{f(r['gamma_linf'])} {f(r['gamma_l2_n'])} "
                         f"{f(r['gamma_l2_dn'])}  {r['linf_final']:.6e}")
        lines.append(f"amplitude slope (Linf at t_final vs eps): "
                     f"{self.amp_slope_linf:.4f}")
        lines.append(f"amplitude slope (L2 Gamma<=1 at t_final vs eps): "
                     f"{self.amp_slope_l2:.4f}")
        lines.append(f"sweep gates {'passed' if self.ok else 'FAILED'}")
        return "\n".join(lines)


def epsilon_sweep(base_config, epsilons, progress=None) -> SweepReport:
    """Rerun one configuration across amplitudes and regress against eps.

    Gates: every run Completed; amplitude slope of the final sup norm
    within 1.0 +- 0.05; fitted exponent of the s<=1 energy-type norm of
    dn at most 0.1 for every amplitude.  The L2 exponent of n itself is
    reported but not gated (log-growth makes a clean power law
    unreachable at desk scale).
    """
    from .integrator import COMPLETED, run

    if not epsilons:
        raise ValueError("epsilons must be a nonempty list")
    rows = []
    for eps in epsilons:
        row = {"epsilon": float(eps), "status": None,
               "gamma_linf": None, "gamma_l2_n": None, "gamma_l2_dn": None,
               "linf_final": math.nan, "l2_final": math.nan}
        try:
            cfg = replace(base_config, data=replace(base_config.data,
                                                    epsilon=float(eps)))
        except ValueError as e:
            # amplitude outside the chart's data range: record, do not crash
            row["status"] = f"Rejected({e})"
            rows.append(row)
            continue
        traj = run(cfg, progress=progress)
        row["status"] = traj.status
        if traj.series:
            row["linf_final"] = float(traj.series[-1].values["Linf_s0"])
            row["l2_final"] = float(traj.series[-1].values["L2_G1"])
        if traj.status == COMPLETED:
            for key, col in (("gamma_linf", "Linf_s0"),
                             ("gamma_l2_n", "L2_G1"),
                             ("gamma_l2_dn", "L2_G1_dn")):
                try:
                    row[key] = fit_decay(traj.series, col,
                                         base_config.fit_window).gamma
                except EmptyWindow:
                    row[key] = None
        rows.append(row)

    ok = all(r["status"] == COMPLETED for r in rows)
    logs = np.log([r["epsilon"] for r in rows])

    def slope(key):
        vals = [r[key] for r in rows]
        if len(rows) < 2 or any(v is None or not (v > 0.0) for v in vals):
            return math.nan
        return float(np.polyfit(logs, np.log(vals), 1)[0])

    amp_linf = slope("linf_final")
    amp_l2 = slope("l2_final")
    if not (abs(amp_linf - 1.0) <= 0.05):
        ok = False
    for r in rows:
        if r["gamma_l2_dn"] is None or r["gamma_l2_dn"] > 0.1:
            ok = False
    return SweepReport(rows=rows, amp_slope_linf=amp_linf,
                       amp_slope_l2=amp_l2, ok=ok)
