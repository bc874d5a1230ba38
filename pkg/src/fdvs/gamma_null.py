"""Klainerman vector fields, null forms, and their identity checks.

The seven generators are Dt, D1, D2, Omega12 = x1 d2 - x2 d1,
L0 = t dt + x1 d1 + x2 d2, and L_i = t d_i + x_i dt.  They act on "nodes":
objects exposing value (an array at the evaluation time), t, grid, and
dt() / dx(axis) returning further nodes.  Two node families exist:

* Ladder: a function sampled on 2K+1 uniform time slices; dt() costs two
  slices of margin and is 4th-order accurate, dx() is the grid stencil.
  Used for analytic test fields.
* SampleField: a solver snapshot whose time derivatives come from the
  state itself (dt n = m, dt m = solved acceleration), so Gamma^k with
  |k| <= 2 of n and |k| <= 1 of dn need no stored history.

Scaled/Sum/Product nodes implement the product rule with the linear
coefficients (1, t, x1, x2), so vector-field compositions and null forms
of vector-field images are all evaluated without symbolic algebra.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FdvsError
from .grid import Grid2D, d1

__all__ = ["GammaOp", "GAMMA_OPS", "Ladder", "ladder_from_fn", "SampleField",
           "SpacetimeSample", "apply_gamma", "box_node", "null_Q", "null_Qab",
           "q_node", "qab_node", "check_lemd11_identity", "check_commutators",
           "check_propa12", "EXPECTED_Q_CLOSURES", "fit_null_closure"]


class DepthExhausted(FdvsError):
    """A time derivative beyond the stored depth was requested."""


@lru_cache(maxsize=32)
def _mesh(grid: Grid2D):
    return grid.meshgrid()


def _coeff(kind, t, grid):
    if kind == "one":
        return 1.0
    if kind == "t":
        return t
    X, Y = _mesh(grid)
    return X if kind == "x1" else Y


class _NodeCache:
    """Mixin: memoize dt/dx so compositions share subexpressions."""

    def dt(self):
        c = getattr(self, "_dt_cache", None)
        if c is None:
            c = self._dt()
            self._dt_cache = c
        return c

    def dx(self, axis):
        c = getattr(self, "_dx_cache", None)
        if c is None:
            c = {}
            self._dx_cache = c
        if axis not in c:
            c[axis] = self._dx(axis)
        return c[axis]


class Ladder(_NodeCache):
    """Scalar sampled on uniform time slices around a center time."""

    def __init__(self, grid, t, delta, slices):
        self.grid = grid
        self.t = t
        self.delta = delta
        self.slices = np.asarray(slices, dtype=float)
        if self.slices.ndim != 3 or self.slices.shape[0] % 2 == 0:
            raise ValueError("slices must be (2K+1, nx, nx)")

    @property
    def K(self):
        return self.slices.shape[0] // 2

    @property
    def value(self):
        return self.slices[self.K]

    def _dt(self):
        if self.K < 2:
            raise DepthExhausted("ladder too short for another dt")
        s = self.slices
        out = (s[:-4] - 8.0 * s[1:-3] + 8.0 * s[3:-1] - s[4:]) \
            / (12.0 * self.delta)
        return Ladder(self.grid, self.t, self.delta, out)

    def _dx(self, axis):
        h = self.grid.h
        out = np.stack([d1(s, h, axis - 1) for s in self.slices])
        return Ladder(self.grid, self.t, self.delta, out)


def ladder_from_fn(fn, grid: Grid2D, t: float, delta: float, K: int) -> Ladder:
    """Sample fn(t, X, Y) on 2K+1 slices centered at t."""
    X, Y = _mesh(grid)
    slices = np.stack([np.broadcast_to(np.asarray(fn(t + j * delta, X, Y),
                                                  dtype=float), X.shape).copy()
                       for j in range(-K, K + 1)])
    return Ladder(grid, t, delta, slices)


class SampleField(_NodeCache):
    """Snapshot scalar whose dt comes from a factory (m, then acceleration)."""

    def __init__(self, value, grid, t, dt_factory=None):
        self.value = np.asarray(value, dtype=float)
        self.grid = grid
        self.t = t
        self._dt_factory = dt_factory

    def _dt(self):
        if self._dt_factory is None:
            raise DepthExhausted("no further time derivative stored for this "
                                 "snapshot field")
        return self._dt_factory()

    def _dx(self, axis):
        v = d1(self.value, self.grid.h, axis - 1)
        fac = None
        if self._dt_factory is not None:
            fac = lambda: self.dt().dx(axis)
        return SampleField(v, self.grid, self.t, fac)


class _Scaled(_NodeCache):
    """factor * c(t, x) * node with c in {1, t, x1, x2}."""

    def __init__(self, kind, node, factor=1.0):
        self.kind = kind
        self.node = node
        self.factor = factor
        self.grid = node.grid
        self.t = node.t

    @property
    def value(self):
        return self.factor * _coeff(self.kind, self.t, self.grid) \
            * self.node.value

    def _dt(self):
        terms = [_Scaled(self.kind, self.node.dt(), self.factor)]
        if self.kind == "t":
            terms.append(_Scaled("one", self.node, self.factor))
        return _Sum(terms)

    def _dx(self, axis):
        terms = [_Scaled(self.kind, self.node.dx(axis), self.factor)]
        if self.kind == f"x{axis}":
            terms.append(_Scaled("one", self.node, self.factor))
        return _Sum(terms)


class _Sum(_NodeCache):
    def __init__(self, terms):
        self.terms = list(terms)
        self.grid = self.terms[0].grid
        self.t = self.terms[0].t

    @property
    def value(self):
        out = self.terms[0].value.copy()
        for n in self.terms[1:]:
            out += n.value
        return out

    def _dt(self):
        return _Sum([n.dt() for n in self.terms])

    def _dx(self, axis):
        return _Sum([n.dx(axis) for n in self.terms])


class _Product(_NodeCache):
    def __init__(self, u, v, factor=1.0):
        self.u, self.v, self.factor = u, v, factor
        self.grid = u.grid
        self.t = u.t

    @property
    def value(self):
        return self.factor * self.u.value * self.v.value

    def _dt(self):
        return _Sum([_Product(self.u.dt(), self.v, self.factor),
                     _Product(self.u, self.v.dt(), self.factor)])

    def _dx(self, axis):
        return _Sum([_Product(self.u.dx(axis), self.v, self.factor),
                     _Product(self.u, self.v.dx(axis), self.factor)])


@dataclass(frozen=True)
class GammaOp:
    """A Klainerman generator: sum of (factor, coefficient, partial) terms."""

    tag: str
    terms: tuple  # of (factor, kind, mu) with mu = 0 (dt), 1, 2


GAMMA_OPS = (
    GammaOp("Dt", ((1.0, "one", 0),)),
    GammaOp("D1", ((1.0, "one", 1),)),
    GammaOp("D2", ((1.0, "one", 2),)),
    GammaOp("Omega12", ((1.0, "x1", 2), (-1.0, "x2", 1))),
    GammaOp("L0", ((1.0, "t", 0), (1.0, "x1", 1), (1.0, "x2", 2))),
    GammaOp("L1", ((1.0, "t", 1), (1.0, "x1", 0))),
    GammaOp("L2", ((1.0, "t", 2), (1.0, "x2", 0))),
)
GAMMA_BY_TAG = {op.tag: op for op in GAMMA_OPS}


def _partial(node, mu):
    return node.dt() if mu == 0 else node.dx(mu)


def apply_gamma(op: GammaOp, node):
    """Discrete action of a vector field; returns a composable node."""
    if isinstance(op, str):
        op = GAMMA_BY_TAG[op]
    return _Sum([_Scaled(kind, _partial(node, mu), fac)
                 for fac, kind, mu in op.terms])


def box_node(node):
    """box u = dtt u - Laplacian u as a composable node."""
    return _Sum([_Scaled("one", node.dt().dt(), 1.0),
                 _Scaled("one", node.dx(1).dx(1), -1.0),
                 _Scaled("one", node.dx(2).dx(2), -1.0)])


# ---- null forms ----

def q_node(f, g):
    """Q(f, g) = dt f dt g - grad f . grad g as a node."""
    return _Sum([_Product(f.dt(), g.dt()),
                 _Product(f.dx(1), g.dx(1), -1.0),
                 _Product(f.dx(2), g.dx(2), -1.0)])


def qab_node(alpha, beta, f, g):
    """Q_ab(f, g) = d_a f d_b g - d_b f d_a g (antisymmetric) as a node."""
    return _Sum([_Product(_partial(f, alpha), _partial(g, beta)),
                 _Product(_partial(f, beta), _partial(g, alpha), -1.0)])


def null_Q(f, g):
    return q_node(f, g).value


def null_Qab(alpha, beta, f, g):
    return qab_node(alpha, beta, f, g).value


# ---- solver snapshots ----

@dataclass(frozen=True)
class SpacetimeSample:
    """Three consecutive states plus solved accelerations at the middle one.

    prev / nxt may be None when only state-based time derivatives are
    needed (Gamma^k of n for |k| <= 2 uses m and the accelerations only).
    """

    cur: object               # FieldState
    accel: tuple              # (a1, a2) arrays
    prev: object = None
    nxt: object = None

    def node(self, name: str) -> SampleField:
        st = self.cur
        g, t = st.grid, st.t
        if name in ("n1", "n2"):
            i = 0 if name == "n1" else 1
            m_val = (st.m1, st.m2)[i].values
            a_val = self.accel[i]
            acc = lambda: SampleField(a_val, g, t)
            m_node = lambda: SampleField(m_val, g, t, acc)
            return SampleField((st.n1, st.n2)[i].values, g, t, m_node)
        if name in ("m1", "m2"):
            i = 0 if name == "m1" else 1
            a_val = self.accel[i]
            return SampleField((st.m1, st.m2)[i].values, g, t,
                               lambda: SampleField(a_val, g, t))
        raise ValueError(f"unknown field {name!r}")

    def triple(self):
        if self.prev is None or self.nxt is None:
            raise ValueError("this sample has no stored history")
        return (self.prev, self.cur, self.nxt)


# ---- identity and commutator checks ----

def check_lemd11_identity(f, g):
    """Max pointwise residual of the 1/t null-form identities.

    Checks, at the sample time t >= 1,
      Q_12 = (-dt f Om12 g + L1 f d2 g - L2 f d1 g) / t,
      Q_0j = ( dt f L_j g - L_j f dt g) / t,
      Q    = ( dt f L0 g - sum_i L_i f d_i g) / t.
    These are exact identities; the residual is pure truncation error.
    """
    t = f.t
    if t < 1.0:
        raise ValueError(f"identities divided by t need t >= 1, got {t}")
    L = {tag: apply_gamma(tag, f) for tag in ("L0", "L1", "L2")}
    Om_g = apply_gamma("Omega12", g)
    Lg = {tag: apply_gamma(tag, g) for tag in ("L0", "L1", "L2")}
    ft, gt = f.dt().value, g.dt().value
    res = {}
    rhs12 = (-ft * Om_g.value + L["L1"].value * g.dx(2).value
             - L["L2"].value * g.dx(1).value) / t
    res["Q12"] = np.max(np.abs(null_Qab(1, 2, f, g) - rhs12))
    for j in (1, 2):
        rhs0j = (ft * Lg[f"L{j}"].value - L[f"L{j}"].value * gt) / t
        res[f"Q0{j}"] = np.max(np.abs(null_Qab(0, j, f, g) - rhs0j))
    rhsQ = (ft * Lg["L0"].value
            - L["L1"].value * g.dx(1).value
            - L["L2"].value * g.dx(2).value) / t
    res["Q"] = np.max(np.abs(null_Q(f, g) - rhsQ))
    return max(res.values()), res


# closure of [Gamma, q] in the span of null forms; q(f, g) keys map to
# {form: constant}.  Derived symbolically once and frozen here.
EXPECTED_Q_CLOSURES = {
    ("Dt", "Q"): {}, ("Dt", "Q01"): {}, ("Dt", "Q02"): {}, ("Dt", "Q12"): {},
    ("D1", "Q"): {}, ("D1", "Q01"): {}, ("D1", "Q02"): {}, ("D1", "Q12"): {},
    ("D2", "Q"): {}, ("D2", "Q01"): {}, ("D2", "Q02"): {}, ("D2", "Q12"): {},
    ("Omega12", "Q"): {}, ("Omega12", "Q01"): {"Q02": -1.0},
    ("Omega12", "Q02"): {"Q01": 1.0}, ("Omega12", "Q12"): {},
    ("L0", "Q"): {"Q": -2.0}, ("L0", "Q01"): {"Q01": -2.0},
    ("L0", "Q02"): {"Q02": -2.0}, ("L0", "Q12"): {"Q12": -2.0},
    ("L1", "Q"): {}, ("L1", "Q01"): {}, ("L1", "Q02"): {"Q12": -1.0},
    ("L1", "Q12"): {"Q02": -1.0},
    ("L2", "Q"): {}, ("L2", "Q01"): {"Q12": 1.0}, ("L2", "Q02"): {},
    ("L2", "Q12"): {"Q01": 1.0},
}

_FORMS = {"Q": q_node, "Q01": lambda f, g: qab_node(0, 1, f, g),
          "Q02": lambda f, g: qab_node(0, 2, f, g),
          "Q12": lambda f, g: qab_node(1, 2, f, g)}


def fit_null_closure(tag: str, form: str, f, g):
    """Least-squares fit of [Gamma, form](f, g) in the null-form basis.

    Returns (coeffs, residual relative to the largest basis-form norm);
    coeffs keyed like EXPECTED_Q_CLOSURES entries.  Normalizing by the
    basis scale keeps the residual meaningful for commutators that
    vanish identically, where the commutator norm is rounding noise.
    """
    op = GAMMA_BY_TAG[tag]
    make = _FORMS[form]
    comm = (apply_gamma(op, make(f, g)).value
            - make(apply_gamma(op, f), g).value
            - make(f, apply_gamma(op, g)).value)
    basis = {name: mk(f, g).value.ravel() for name, mk in _FORMS.items()}
    Bmat = np.stack(list(basis.values()), axis=1)
    sol, *_ = np.linalg.lstsq(Bmat, comm.ravel(), rcond=None)
    fitres = comm.ravel() - Bmat @ sol
    scale = max(np.linalg.norm(b) for b in basis.values()) + 1e-300
    coeffs = {name: float(c) for name, c in zip(basis, sol)}
    return coeffs, float(np.linalg.norm(fitres) / scale)


def check_commutators(fields, quiet=True):
    """Residual table for the wave-operator and null-form commutators.

    fields is a list of (name, f_node, g_node); for each entry the table
    records max |box f| (the scale), max |[box, Omega12] f|,
    |[box, L_i] f|, the relative error of [box, L0] f = 2 box f, and the
    fitted null-form closure constants.
    """
    rows = []
    for name, f, g in fields:
        row = {"field": name}
        box_f = box_node(f)
        row["box_scale"] = float(np.max(np.abs(box_f.value)))
        for tag in ("Omega12", "L1", "L2"):
            Gf = apply_gamma(tag, f)
            comm = box_node(Gf).value - apply_gamma(tag, box_f).value
            row[f"box_{tag}"] = float(np.max(np.abs(comm)))
        GL0 = apply_gamma("L0", f)
        lhs = box_node(GL0).value - apply_gamma("L0", box_f).value
        ref = 2.0 * box_f.value
        row["box_L0_relerr"] = float(np.max(np.abs(lhs - ref))
                                     / (np.max(np.abs(ref)) + 1e-300))
        lam_err = 0.0
        fit_res = 0.0
        for (tag, form), expected in EXPECTED_Q_CLOSURES.items():
            coeffs, rres = fit_null_closure(tag, form, f, g)
            for fname in _FORMS:
                lam_err = max(lam_err,
                              abs(coeffs[fname] - expected.get(fname, 0.0)))
            fit_res = max(fit_res, rres)
        row["lambda_maxerr"] = lam_err
        row["closure_relres"] = fit_res
        rows.append(row)
    return rows


def check_propa12(u, region=None):
    """Worst ratio (1 + |t - |x||) |du| / sum_{|a|<=1} |Gamma^a u|.

    |du| is the largest of the three |d_mu u|; the denominator sums |u|
    and the seven |Gamma u|.  Points where the denominator vanishes use
    the convention 0/0 = 0.  region optionally masks the max.
    """
    g, t = u.grid, u.t
    X, Y = _mesh(g)
    r = np.hypot(X, Y)
    du = np.maximum(np.abs(u.dt().value),
                    np.maximum(np.abs(u.dx(1).value), np.abs(u.dx(2).value)))
    denom = np.abs(u.value)
    for op in GAMMA_OPS:
        denom = denom + np.abs(apply_gamma(op, u).value)
    num = (1.0 + np.abs(t - r)) * du
    ratio = np.where(denom > 1e-300, num / np.maximum(denom, 1e-300), 0.0)
    if region is not None:
        ratio = np.where(region, ratio, 0.0)
    return float(np.max(ratio))
