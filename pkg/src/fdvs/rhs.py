"""Quasi-linear right-hand-side assembly for the chart wave system.

The chart system reads, with w = 1 - n1^2 - n2^2 and indices raised by
eta = diag(1, -1, -1),

    box n_a + S_a - T_a = 0,
    S_a  = [ (Q11 + Q22) - (n2^2 Q11 + n1^2 Q22 - 2 n1 n2 Q12) ] n_a / w,
    T_a  = (1/sqrt w) d_mu( K^{mu nu} / sqrt w ) V^(a)_nu,
    Q_ab = d_mu n_a d^mu n_b,
    K^{mu nu} = d^mu n1 d^nu n2 - d^nu n1 d^mu n2,
    V^(1)_nu = (1 - n1^2) d_nu n2 + n1 n2 d_nu n1,
    V^(2)_nu = -(1 - n2^2) d_nu n1 - n1 n2 d_nu n2.

Expanding T_a by the product rule and isolating the pure dtt terms gives a
pointwise 2x2 principal system A . (dtt n1, dtt n2) = R; A - I involves only
spatial first derivatives (see docs/equations.md for the full derivation,
verified symbolically in tests/test_rhs_symbolic.py and numerically against
the free-differentiation oracle).  Mixed dt-dx derivatives are known data
(derivatives of m), so the system is solvable pointwise.
"""
from dataclasses import dataclass

import numpy as np

from .chart import FieldState, check_chart, reconstruct_sphere
from .errors import NonFinite, PrincipalDegenerate
from .grid import Grid2D, ScalarField, d1, d2, laplacian

__all__ = ["DET_FLOOR", "DerivativeBundle", "PrincipalSystem",
           "bundle_derivatives", "assemble", "solve_accel",
           "residual_faddeev3"]

DET_FLOOR = 0.1
ETA = (1.0, -1.0, -1.0)


@dataclass(frozen=True)
class DerivativeBundle:
    """Pointwise derivative data of a state.

    dn_a[mu] holds the lower-index partials (dt, dx, dy) of n_a (dt from m);
    hess_a[i][j] the spatial second derivatives; dtdx_a[i] the mixed
    dt-dx_i derivatives (spatial derivatives of m_a).
    """

    grid: Grid2D
    n1: np.ndarray
    n2: np.ndarray
    dn1: np.ndarray    # (3, nx, nx)
    dn2: np.ndarray
    hess1: np.ndarray  # (2, 2, nx, nx), symmetric
    hess2: np.ndarray
    dtdx1: np.ndarray  # (2, nx, nx)
    dtdx2: np.ndarray


@dataclass(frozen=True)
class PrincipalSystem:
    """Per-point 2x2 system A . (dtt n1, dtt n2) = R."""

    grid: Grid2D
    A: np.ndarray  # (2, 2, nx, nx)
    R: np.ndarray  # (2, nx, nx)


def bundle_derivatives(state: FieldState) -> DerivativeBundle:
    """Evaluate all first, spatial second, and mixed derivatives of a state."""
    check_chart(state)
    g = state.grid
    h = g.h
    out = {}
    for name, nv, mv in (("1", state.n1.values, state.m1.values),
                         ("2", state.n2.values, state.m2.values)):
        gx = d1(nv, h, 0)
        gy = d1(nv, h, 1)
        out["dn" + name] = np.stack([mv, gx, gy])
        hxx = d2(nv, h, 0)
        hyy = d2(nv, h, 1)
        hxy = d1(gx, h, 1)  # canonical composition, symmetric by construction
        out["hess" + name] = np.stack([np.stack([hxx, hxy]),
                                       np.stack([hxy, hyy])])
        out["dtdx" + name] = np.stack([d1(mv, h, 0), d1(mv, h, 1)])
    b = DerivativeBundle(grid=g, n1=state.n1.values, n2=state.n2.values, **out)
    for arr in (b.dn1, b.dn2, b.hess1, b.hess2, b.dtdx1, b.dtdx2):
        if not np.all(np.isfinite(arr)):
            raise NonFinite("derivative bundle contains NaN or Inf")
    return b


def _minkowski(da, db):
    """d_mu f d^mu g for stacked lower-index gradients."""
    return da[0] * db[0] - da[1] * db[1] - da[2] * db[2]


def _V(b):
    """Covector fields V^(1)_nu, V^(2)_nu as (2, 3, nx, nx)."""
    c1 = 1.0 - b.n1 ** 2
    c2 = 1.0 - b.n2 ** 2
    cx = b.n1 * b.n2
    V1 = c1 * b.dn2 + cx * b.dn1
    V2 = -c2 * b.dn1 - cx * b.dn2
    return np.stack([V1, V2])


def _second(b, comp, mu, nu):
    """d_mu d^nu n_comp with the (0, 0) entry zeroed (the implicit dtt)."""
    dtdx = b.dtdx1 if comp == 1 else b.dtdx2
    hess = b.hess1 if comp == 1 else b.hess2
    if mu == 0 and nu == 0:
        return 0.0
    if mu == 0:
        return -dtdx[nu - 1]       # eta_nu * dt dx_nu
    if nu == 0:
        return dtdx[mu - 1]        # dx_mu dt, eta_0 = +1
    return -hess[mu - 1][nu - 1]


def _semilinear(b, w):
    """Cubic semi-linear blocks S_a (left-side sign)."""
    Q11 = _minkowski(b.dn1, b.dn1)
    Q22 = _minkowski(b.dn2, b.dn2)
    Q12 = _minkowski(b.dn1, b.dn2)
    block = (Q11 + Q22) - (b.n2 ** 2 * Q11 + b.n1 ** 2 * Q22
                           - 2.0 * b.n1 * b.n2 * Q12)
    return np.stack([block * b.n1 / w, block * b.n2 / w])


def _quasilinear_rest(b, w, V):
    """The quasi-linear term with its dtt contributions removed."""
    up1 = np.stack([ETA[m] * b.dn1[m] for m in range(3)])
    up2 = np.stack([ETA[m] * b.dn2[m] for m in range(3)])
    lap1 = b.hess1[0][0] + b.hess1[1][1]
    lap2 = b.hess2[0][0] + b.hess2[1][1]
    P = b.n1 * b.dn1 + b.n2 * b.dn2  # lower-index d_mu of -(w)/2
    K = np.einsum("m...,n...->mn...", up1, up2) \
        - np.einsum("n...,m...->mn...", up1, up2)
    T = np.zeros((2,) + b.n1.shape)
    for nu in range(3):
        div = -lap1 * up2[nu] + lap2 * up1[nu]  # reduced box terms
        for m in range(3):
            div += ETA[m] * b.dn1[m] * _second(b, 2, m, nu)
            div -= ETA[m] * b.dn2[m] * _second(b, 1, m, nu)
        PK = sum(P[m] * K[m, nu] for m in range(3))
        for a in range(2):
            T[a] += (div / w + PK / w ** 2) * V[a, nu]
    return T


def assemble(state: FieldState) -> PrincipalSystem:
    """Expand the chart system into A . (dtt n) = R at every grid point."""
    b = bundle_derivatives(state)
    w = 1.0 - b.n1 ** 2 - b.n2 ** 2
    V = _V(b)
    nx = state.grid.nx
    A = np.zeros((2, 2, nx, nx))
    for a in range(2):
        # spatial contractions sum_i di n_b V^(a)_i
        c1 = b.dn1[1] * V[a, 1] + b.dn1[2] * V[a, 2]
        c2 = b.dn2[1] * V[a, 1] + b.dn2[2] * V[a, 2]
        A[a, 0] = (1.0 if a == 0 else 0.0) + c2 / w
        A[a, 1] = (1.0 if a == 1 else 0.0) - c1 / w
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if np.min(det) <= DET_FLOOR:
        raise PrincipalDegenerate(
            f"min det A = {np.min(det):.3e} <= {DET_FLOOR} at t = {state.t:g}")
    lap = np.stack([b.hess1[0][0] + b.hess1[1][1],
                    b.hess2[0][0] + b.hess2[1][1]])
    R = lap - _semilinear(b, w) + _quasilinear_rest(b, w, V)
    if not np.all(np.isfinite(R)):
        raise NonFinite("assembled right side contains NaN or Inf")
    return PrincipalSystem(grid=state.grid, A=A, R=R)


def solve_accel(sys: PrincipalSystem):
    """Exact pointwise Cramer solve a = A^-1 R; returns (a1, a2)."""
    A, R = sys.A, sys.R
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if np.min(det) <= DET_FLOOR:
        raise PrincipalDegenerate(f"min det A = {np.min(det):.3e}")
    a1 = (R[0] * A[1, 1] - A[0, 1] * R[1]) / det
    a2 = (A[0, 0] * R[1] - A[1, 0] * R[0]) / det
    return (ScalarField(sys.grid, a1), ScalarField(sys.grid, a2))


def _sphere_jets(state: FieldState):
    """Per-state sphere map with chain-rule dt and spatial first derivatives.

    Returns (n, dtn, dxn, dyn), each a list of three component arrays.
    """
    sm = reconstruct_sphere(state)
    n = [sm.n1.values, sm.n2.values, sm.n3.values]
    m1, m2 = state.m1.values, state.m2.values
    dtn3 = -(n[0] * m1 + n[1] * m2) / n[2]
    dtn = [m1, m2, dtn3]
    h = state.grid.h
    dxn = [d1(c, h, 0) for c in n]
    dyn = [d1(c, h, 1) for c in n]
    return n, dtn, dxn, dyn


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0]]


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def residual_faddeev3(history) -> ScalarField:
    """Pointwise norm of the sphere-form equation residual at the middle state.

    history is three consecutive chart-valid FieldStates at t - dt, t, t + dt;
    time derivatives use centered differences across the triple, spatial ones
    the grid stencils, and dt of the chart fields the chain rule.
    """
    prev, cur, nxt = history
    if prev.grid != cur.grid or nxt.grid != cur.grid:
        raise ValueError("history states must share a grid")
    dt_f = nxt.t - cur.t
    dt_b = cur.t - prev.t
    if abs(dt_f - dt_b) > 1e-10 * max(abs(dt_f), 1e-30):
        raise ValueError("history must be uniformly spaced in time")
    dt = dt_f
    g = cur.grid
    h = g.h

    jp, jc, jn = (_sphere_jets(s) for s in (prev, cur, nxt))
    n_p, n_c, n_n = jp[0], jc[0], jn[0]
    dtn_c = jc[1]
    dxn_c, dyn_c = jc[2], jc[3]
    gradn_c = [dxn_c, dyn_c]

    # box n: centered second time difference minus the spatial Laplacian
    box = [(n_n[k] - 2.0 * n_c[k] + n_p[k]) / dt ** 2 - laplacian(n_c[k], h)
           for k in range(3)]

    # scalar d_mu n . d^mu n at the middle slice
    dot_dn = _dot(dtn_c, dtn_c) - _dot(dxn_c, dxn_c) - _dot(dyn_c, dyn_c)

    # c^{mu nu} = n . (d^mu n wedge d^nu n); needed pieces only
    def c0j(jet, j):
        n_, dtn_, dxn_, dyn_ = jet
        dj = dxn_ if j == 1 else dyn_
        return -_dot(n_, _cross(dtn_, dj))  # d^j = -d_j

    c01 = {"p": c0j(jp, 1), "c": c0j(jc, 1), "n": c0j(jn, 1)}
    c02 = {"p": c0j(jp, 2), "c": c0j(jc, 2), "n": c0j(jn, 2)}
    c12 = _dot(n_c, _cross(dxn_c, dyn_c))  # d^1 d^2: signs cancel

    # sum_mu d_mu c^{mu nu} for nu = 0, 1, 2
    div_c = [
        d1(-c01["c"], h, 0) + d1(-c02["c"], h, 1),          # c^{i0} = -c^{0i}
        (c01["n"] - c01["p"]) / (2.0 * dt) + d1(-c12, h, 1),  # c^{21} = -c^{12}
        (c02["n"] - c02["p"]) / (2.0 * dt) + d1(c12, h, 0),
    ]

    res = [box[k] + dot_dn * n_c[k] for k in range(3)]
    for nu, dnu in ((0, dtn_c), (1, gradn_c[0]), (2, gradn_c[1])):
        wedge = _cross(dnu, n_c)
        for k in range(3):
            res[k] -= div_c[nu] * wedge[k]
    norm = np.sqrt(res[0] ** 2 + res[1] ** 2 + res[2] ** 2)
    return ScalarField(g, norm)
