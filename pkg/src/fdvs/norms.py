"""Mixed radial-angular norms, vector-field Sobolev norms, Hardy check.

norm_pq computes the L^{p,q} family: inner L^q over the angle, outer L^p
over the radius with the planar weight r dr, optionally restricted to the
interior region {|x| <= 1 + t/2} or its complement.  gamma_norm sums
norm_pq over all ordered vector-field compositions up to a given order.

Quadrature notes: the polar resampling is bilinear on radii r_k =
(k + 1/2) dr up to the half-width L (the inscribed disk), and the angular
rule is the periodic trapezoid.  For p = q = 2 or p = q = inf on the full
region the norm is taken directly on the Cartesian grid, which is exact
there and keeps the plain-L2 reduction sharp.  Polar sup norms are grid
sups and hence lower bounds of the continuum sup; all our acceptance uses
are two-sided fits where this bias cancels.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SupportViolation
from .gamma_null import GAMMA_OPS, apply_gamma
from .grid import ScalarField, d1, to_polar

__all__ = ["NormSpec", "SeriesRecord", "norm_pq", "gamma_norm", "check_hardy",
           "N_THETA"]

N_THETA = 256
REGIONS = ("All", "Interior", "Exterior")


def _as_exp(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            return math.inf
        p = float(p)
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"exponent must be >= 1 or inf, got {p}")
    return p


@dataclass(frozen=True)
class NormSpec:
    """Weighted norm selector: exponents, vector-field order, region."""

    p: float
    q: float
    s: int = 0
    region: str = "All"

    def __post_init__(self):
        object.__setattr__(self, "p", _as_exp(self.p))
        object.__setattr__(self, "q", _as_exp(self.q))
        if self.s not in (0, 1, 2):
            raise ValueError(f"s must be 0, 1 or 2, got {self.s}")
        if self.region not in REGIONS:
            raise ValueError(f"region must be one of {REGIONS}, "
                             f"got {self.region!r}")

    def label(self) -> str:
        def e(v):
            if v == math.inf:
                return "inf"
            return f"{v:g}"
        tag = f"L{e(self.p)}_{e(self.q)}_s{self.s}"
        if self.region != "All":
            tag += f"_{self.region.lower()}"
        return tag


@dataclass
class SeriesRecord:
    """One diagnostics row: a time stamp plus named finite scalars."""

    t: float
    values: dict

    def __post_init__(self):
        for k, v in self.values.items():
            if not np.isfinite(v):
                raise ValueError(f"non-finite diagnostic {k!r} at t={self.t}")


def norm_pq(f: ScalarField, p, q, t: float = 0.0, region: str = "All",
            n_theta: int = N_THETA) -> float:
    """L^{p,q} norm of a scalar field, region-masked by radius."""
    p, q = _as_exp(p), _as_exp(q)
    if region not in REGIONS:
        raise ValueError(f"region must be one of {REGIONS}, got {region!r}")
    v = f.values
    if region == "All" and p == 2.0 and q == 2.0:
        return float(np.sqrt(np.sum(v * v)) * f.grid.h)
    if region == "All" and p == math.inf and q == math.inf:
        return float(np.max(np.abs(v)))

    samples = to_polar(f, n_theta=n_theta)
    radii, vals = samples.radii, np.abs(samples.values)
    boundary = 1.0 + 0.5 * t
    if region == "Interior":
        keep = radii <= boundary
    elif region == "Exterior":
        keep = radii > boundary
    else:
        keep = np.ones_like(radii, dtype=bool)
    if not np.any(keep):
        return 0.0
    radii, vals = radii[keep], vals[keep]

    dtheta = 2.0 * np.pi / n_theta
    if q == math.inf:
        inner = np.max(vals, axis=1)
    else:
        inner = (np.sum(vals ** q, axis=1) * dtheta) ** (1.0 / q)
    if p == math.inf:
        return float(np.max(inner))
    dr = samples.dr
    return float((np.sum(inner ** p * radii) * dr) ** (1.0 / p))


def _as_node(sample, field):
    if isinstance(field, str):
        return sample.node(field)
    return field


def gamma_norm(sample, spec: NormSpec, fields=("n1", "n2"),
               n_theta: int = N_THETA) -> float:
    """Sum of norm_pq over all Gamma^k images, |k| <= spec.s.

    sample is a SpacetimeSample (or anything with .node); fields may be
    node names or node objects.  All 7**k ordered compositions of the
    generators are included for each order k.
    """
    total = 0.0
    for field in fields:
        base = _as_node(sample, field)
        grid, t = base.grid, base.t
        for k in range(spec.s + 1):
            for ops in itertools.product(GAMMA_OPS, repeat=k):
                node = base
                for op in ops:
                    node = apply_gamma(op, node)
                sf = ScalarField(grid, node.value)
                total += norm_pq(sf, spec.p, spec.q, t=t, region=spec.region,
                                 n_theta=n_theta)
    return total


def check_hardy(v: ScalarField, t: float, rho: float) -> float:
    """Ratio ||v / (rho + |t - |x||)||_L2 over ||grad v||_L2.

    v must be supported in {|x| <= t + rho}; the bound being tested is
    that this ratio stays below a t-independent constant.  Zero gradient
    returns 0 by convention.
    """
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    g = v.grid
    vals = v.values
    r = g.radius()
    vmax = np.max(np.abs(vals))
    outside = np.abs(np.where(r > t + rho, vals, 0.0))
    if vmax > 0.0 and np.max(outside) > 1e-10 * vmax:
        raise SupportViolation(
            f"field exceeds support radius t + rho = {t + rho}: "
            f"relative tail {np.max(outside) / vmax:.2e}")
    weighted = vals / (rho + np.abs(t - r))
    num = np.sqrt(np.sum(weighted ** 2)) * g.h
    gx = d1(vals, g.h, 0)
    gy = d1(vals, g.h, 1)
    den = np.sqrt(np.sum(gx * gx + gy * gy)) * g.h
    if den == 0.0:
        return 0.0
    return float(num / den)
