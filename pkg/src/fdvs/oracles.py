"""Free-differentiation oracle for the chart-system right-hand side.

The expanded evolution operator (principal matrix A and remainder R) is
verified against a direct evaluation of the unexpanded equation

    box n_a + S_a - T_a = 0-form left side,

where every derivative, including the outer d_mu acting on the composite
flux K^{mu nu} / sqrt(w), is taken by centered differences on samples of
an analytic map n(t, x): 4th order in space (grid stencils) and 4th
order in time (5-point stencils over 9 stored slices).  No product-rule
expansion enters this path, so it is an independent discretization of
the same continuum object and the two paths must agree to
O(h^4 + delta^4).

Analytic maps carry exact first and second time derivatives so the
expansion path can be fed exact (n, m) states and exact accelerations.
"""
from dataclasses import dataclass

import numpy as np

from .chart import FieldState
from .grid import Grid2D, ScalarField, d1, laplacian
from . import rhs

__all__ = ["AnalyticMap", "analytic_maps", "state_from_map",
           "accel_from_map", "lhs_free_diff", "expansion_gap",
           "oracle_convergence"]


@dataclass(frozen=True)
class AnalyticMap:
    """Chart components of a space-time analytic map with exact t-jets."""

    name: str
    n1: object
    n2: object
    dt_n1: object
    dt_n2: object
    dtt_n1: object
    dtt_n2: object


def analytic_maps(L: float):
    """Three test maps, periodic-compatible on the box of half-width L."""
    k1, k2 = 2.0 * np.pi / L, 4.0 * np.pi / L
    w1, w2 = 1.3, 0.9
    a, b = 0.32, 0.27

    def sw_n1(t, X, Y):
        return a * np.sin(k1 * X + 0.3) * np.cos(k2 * Y - 0.2) \
            * np.cos(w1 * t + 0.4)

    def sw_n2(t, X, Y):
        return b * np.cos(k2 * X - 0.1) * np.sin(k1 * Y + 0.5) \
            * np.sin(w2 * t + 0.7)

    def sw_dt1(t, X, Y):
        return -w1 * a * np.sin(k1 * X + 0.3) * np.cos(k2 * Y - 0.2) \
            * np.sin(w1 * t + 0.4)

    def sw_dt2(t, X, Y):
        return w2 * b * np.cos(k2 * X - 0.1) * np.sin(k1 * Y + 0.5) \
            * np.cos(w2 * t + 0.7)

    def sw_dtt1(t, X, Y):
        return -w1 * w1 * sw_n1(t, X, Y)

    def sw_dtt2(t, X, Y):
        return -w2 * w2 * sw_n2(t, X, Y)

    standing = AnalyticMap("standing_wave", sw_n1, sw_n2, sw_dt1, sw_dt2,
                           sw_dtt1, sw_dtt2)

    sig, c = 0.8, 0.6
    ga, gb = 0.34, 0.28
    s2 = sig * sig

    def g_n1(t, X, Y):
        u = X - 0.3 - c * t
        return ga * np.exp(-(u * u + Y * Y) / (2.0 * s2))

    def g_dt1(t, X, Y):
        u = X - 0.3 - c * t
        return g_n1(t, X, Y) * (c * u / s2)

    def g_dtt1(t, X, Y):
        u = X - 0.3 - c * t
        return g_n1(t, X, Y) * (c * c / s2) * (u * u / s2 - 1.0)

    def g_n2(t, X, Y):
        v = Y + 0.2 + c * t
        return gb * np.exp(-(X * X + v * v) / (2.0 * s2))

    def g_dt2(t, X, Y):
        v = Y + 0.2 + c * t
        return g_n2(t, X, Y) * (-c * v / s2)

    def g_dtt2(t, X, Y):
        v = Y + 0.2 + c * t
        return g_n2(t, X, Y) * (c * c / s2) * (v * v / s2 - 1.0)

    traveling = AnalyticMap("traveling_gaussians", g_n1, g_n2, g_dt1, g_dt2,
                            g_dtt1, g_dtt2)

    rsig, Om, om = 1.1, 0.8, 1.1
    ra, rb = 0.42, 0.36
    rs2 = rsig * rsig

    def _uv(t, X, Y):
        ct, st = np.cos(Om * t), np.sin(Om * t)
        return X * ct + Y * st, -X * st + Y * ct

    def _env(X, Y):
        return np.exp(-(X * X + Y * Y) / (2.0 * rs2))

    def r_n1(t, X, Y):
        u, _ = _uv(t, X, Y)
        return (ra / rsig) * u * _env(X, Y)

    def r_dt1(t, X, Y):
        _, v = _uv(t, X, Y)
        return (ra / rsig) * Om * v * _env(X, Y)

    def r_dtt1(t, X, Y):
        u, _ = _uv(t, X, Y)
        return -(ra / rsig) * Om * Om * u * _env(X, Y)

    def r_n2(t, X, Y):
        _, v = _uv(t, X, Y)
        return (rb / rsig) * v * _env(X, Y) * np.cos(om * t)

    def r_dt2(t, X, Y):
        u, v = _uv(t, X, Y)
        return (rb / rsig) * _env(X, Y) * (-Om * u * np.cos(om * t)
                                           - om * v * np.sin(om * t))

    def r_dtt2(t, X, Y):
        u, v = _uv(t, X, Y)
        return (rb / rsig) * _env(X, Y) * (
            -(Om * Om + om * om) * v * np.cos(om * t)
            + 2.0 * Om * om * u * np.sin(om * t))

    rotating = AnalyticMap("rotating_lump", r_n1, r_n2, r_dt1, r_dt2,
                           r_dtt1, r_dtt2)

    return standing, traveling, rotating


def state_from_map(amap: AnalyticMap, grid: Grid2D, t: float) -> FieldState:
    X, Y = grid.meshgrid()
    return FieldState(
        grid=grid, t=t,
        n1=ScalarField(grid, amap.n1(t, X, Y)),
        n2=ScalarField(grid, amap.n2(t, X, Y)),
        m1=ScalarField(grid, amap.dt_n1(t, X, Y)),
        m2=ScalarField(grid, amap.dt_n2(t, X, Y)))


def accel_from_map(amap: AnalyticMap, grid: Grid2D, t: float):
    X, Y = grid.meshgrid()
    return amap.dtt_n1(t, X, Y), amap.dtt_n2(t, X, Y)


def _first_t(slabs, delta):
    return (slabs[0] - 8.0 * slabs[1] + 8.0 * slabs[3] - slabs[4]) \
        / (12.0 * delta)


def _second_t(slabs, delta):
    return (-slabs[0] + 16.0 * slabs[1] - 30.0 * slabs[2] + 16.0 * slabs[3]
            - slabs[4]) / (12.0 * delta * delta)


def lhs_free_diff(amap: AnalyticMap, grid: Grid2D, t: float, delta: float):
    """Unexpanded left side by nested centered differences on samples.

    Returns (E1, E2) arrays.  Uses 9 time slices t + j delta, j = -4..4;
    only component samples enter (the exact derivative callables are not
    used), so this path shares nothing with the expanded assembly beyond
    the sampled map itself.
    """
    X, Y = grid.meshgrid()
    h = grid.h
    N1 = np.stack([amap.n1(t + j * delta, X, Y) for j in range(-4, 5)])
    N2 = np.stack([amap.n2(t + j * delta, X, Y) for j in range(-4, 5)])

    # first time derivatives on the inner five slices (indices 2..6)
    M1 = np.stack([_first_t(N1[j - 2:j + 3], delta) for j in range(2, 7)])
    M2 = np.stack([_first_t(N2[j - 2:j + 3], delta) for j in range(2, 7)])

    # flux G^{mu nu} = K^{mu nu} / sqrt(w) on the inner five slices
    G = np.zeros((3, 3, 5) + X.shape)
    for k, idx in enumerate(range(2, 7)):
        n1s, n2s = N1[idx], N2[idx]
        up1 = (M1[k], -d1(n1s, h, 0), -d1(n1s, h, 1))
        up2 = (M2[k], -d1(n2s, h, 0), -d1(n2s, h, 1))
        sw = np.sqrt(1.0 - n1s * n1s - n2s * n2s)
        for mu in range(3):
            for nu in range(3):
                if mu == nu:
                    continue
                G[mu, nu, k] = (up1[mu] * up2[nu] - up1[nu] * up2[mu]) / sw

    # divergence d_mu G^{mu nu}: time part by the 5-point stencil over
    # the stored slices, spatial parts at the center slice
    divG = [None] * 3
    for nu in range(3):
        divG[nu] = (_first_t(G[0, nu], delta) + d1(G[1, nu, 2], h, 0)
                    + d1(G[2, nu, 2], h, 1))

    n1c, n2c = N1[4], N2[4]
    dn1 = (M1[2], d1(n1c, h, 0), d1(n1c, h, 1))
    dn2 = (M2[2], d1(n2c, h, 0), d1(n2c, h, 1))

    def mink(da, db):
        return da[0] * db[0] - da[1] * db[1] - da[2] * db[2]

    q11, q22, q12 = mink(dn1, dn1), mink(dn2, dn2), mink(dn1, dn2)
    w = 1.0 - n1c * n1c - n2c * n2c
    block = (q11 + q22) - (n2c * n2c * q11 + n1c * n1c * q22
                           - 2.0 * n1c * n2c * q12)
    S1 = block * n1c / w
    S2 = block * n2c / w

    V1 = [(1.0 - n1c * n1c) * dn2[nu] + n1c * n2c * dn1[nu]
          for nu in range(3)]
    V2 = [-(1.0 - n2c * n2c) * dn1[nu] - n1c * n2c * dn2[nu]
          for nu in range(3)]
    sw = np.sqrt(w)
    T1 = sum(divG[nu] * V1[nu] for nu in range(3)) / sw
    T2 = sum(divG[nu] * V2[nu] for nu in range(3)) / sw

    box1 = _second_t(N1[2:7], delta) - laplacian(n1c, h)
    box2 = _second_t(N2[2:7], delta) - laplacian(n2c, h)
    return box1 + S1 - T1, box2 + S2 - T2


def expansion_gap(amap: AnalyticMap, grid: Grid2D, t: float,
                  delta: float = None) -> float:
    """Max |A a_exact - R - E_oracle| between the two discretizations."""
    if delta is None:
        delta = 0.5 * grid.h
    state = state_from_map(amap, grid, t)
    sys = rhs.assemble(state)
    a1, a2 = accel_from_map(amap, grid, t)
    lhs1 = sys.A[0][0] * a1 + sys.A[0][1] * a2 - sys.R[0]
    lhs2 = sys.A[1][0] * a1 + sys.A[1][1] * a2 - sys.R[1]
    E1, E2 = lhs_free_diff(amap, grid, t, delta)
    return float(max(np.max(np.abs(lhs1 - E1)), np.max(np.abs(lhs2 - E2))))


def oracle_convergence(amap: AnalyticMap, L: float, nx_list, t: float):
    """Gap per resolution with delta = h/2, plus fitted decay order."""
    gaps = []
    for nx in nx_list:
        g = Grid2D(nx=nx, L=L)
        gaps.append(expansion_gap(amap, g, t, delta=0.5 * g.h))
    orders = [float(np.log2(gaps[i] / gaps[i + 1]))
              for i in range(len(gaps) - 1)]
    return gaps, orders
