"""
Odd scalar functions, the Jordan triple structure of p, spectral
decomposition and the odd functional calculus X = sum l_i c_i  ->
sum eta(l_i) c_i, which is every strongly diagonal realization written in
the Log_o chart.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import bernoulli, comb, factorial

from .algebra import AlgVec, bracket
from .errors import (CertificateFailure, DomainExceeded, NoSeriesAvailable, NotPositiveDefinite,
                     RankMismatch, UnknownName)
from .tolerances import DEFAULT

HALF_PI = 0.5 * np.pi


# ---- odd maps -----------------------------------------------------------------

@dataclass(eq=False)
class OddMap:
    name: str
    f: Callable
    df: Callable
    inverse: Optional[Callable] = None
    radius: float = np.inf          # eta defined on (-R, R)
    sup: float = np.inf             # s_eta
    dual_name: Optional[str] = None
    series: Optional[Callable] = None   # k -> a_k for x^(2k+1)
    series_radius: float = np.inf
    injective: bool = True
    coeffs: Optional[tuple] = None  # explicit finite coefficient list

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def deriv(self, x):
        return self.df(np.asarray(x, dtype=float))

    @property
    def dual(self):
        return dual_function(self)

    def __repr__(self):
        return f"OddMap({self.name})"


def _series_eval(coeffs, x, deriv=False):
    x = np.asarray(x, dtype=float)
    x2 = x * x
    acc = np.zeros_like(x)
    for k in range(len(coeffs) - 1, -1, -1):
        a = coeffs[k] * ((2 * k + 1) if deriv else 1.0)
        acc = acc * x2 + a
    return acc if deriv else acc * x


def _logcosh_ratio(x):
    # 2 log cosh x / x^2, stable near 0
    ax = np.abs(x)
    small = ax < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        lc = ax + np.log1p(np.exp(-2 * ax)) - np.log(2.0)
        big = 2 * lc / (ax * ax)
    x2 = x * x
    ser = 1 - x2 / 6 + 2 * x2 * x2 / 45
    return np.where(small, ser, big)


def _logcos_ratio(x):
    # -2 log cos x / x^2, stable near 0
    ax = np.abs(x)
    small = ax < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        big = -2 * np.log(np.cos(ax)) / (ax * ax)
    x2 = x * x
    ser = 1 + x2 / 6 + 2 * x2 * x2 / 45
    return np.where(small, ser, big)


def _lm(x):
    return x * np.sqrt(_logcosh_ratio(x))


def _lm_d(x):
    r = np.sqrt(_logcosh_ratio(x))
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.tanh(ax) / (ax * r)
    x2 = x * x
    ser = 1 - x2 / 4 + 7 * x2 * x2 / 160   # tanh x / sqrt(2 log cosh x)
    return np.where(ax < 1e-3, ser, big)


def _lm_inv(y):
    t = np.expm1(0.5 * y * y)          # cosh x - 1
    return np.sign(y) * np.log1p(t + np.sqrt(t * (t + 2)))


def _lmd(x):
    return x * np.sqrt(_logcos_ratio(x))


def _lmd_d(x):
    r = np.sqrt(_logcos_ratio(x))
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.tan(ax) / (ax * r)
    x2 = x * x
    ser = 1 + x2 / 4 + 7 * x2 * x2 / 160
    return np.where(ax < 1e-3, ser, big)


def _lmd_inv(y):
    t = -np.expm1(-0.5 * y * y)        # 1 - cos x
    return np.sign(y) * 2 * np.arcsin(np.sqrt(0.5 * t))


def _gd(x):
    return np.arctan(np.sinh(x))


def _sa(x):
    return x / np.sqrt(1 - x * x)


def _tanh_series(k):
    n = k + 1
    B = bernoulli(2 * n)[2 * n]
    return float(2 ** (2 * n) * (2 ** (2 * n) - 1) * B / factorial(2 * n, exact=True))


def _tan_series(k):
    return abs(_tanh_series(k))


def _asin_series(k):
    return float(comb(2 * k, k, exact=True) / (4 ** k * (2 * k + 1)))


_BUILTINS = {
    "id": dict(f=lambda x: x, df=lambda x: np.ones_like(x), inverse=lambda y: y,
               dual_name="id", series=lambda k: 1.0 if k == 0 else 0.0, coeffs=(1.0,)),
    "tanh": dict(f=np.tanh, df=lambda x: 1 / np.cosh(x) ** 2, inverse=np.arctanh, sup=1.0,
                 dual_name="tan", series=_tanh_series, series_radius=HALF_PI),
    "sinh": dict(f=np.sinh, df=np.cosh, inverse=np.arcsinh, dual_name="sin",
                 series=lambda k: 1.0 / math.factorial(2 * k + 1)),
    "tan": dict(f=np.tan, df=lambda x: 1 / np.cos(x) ** 2, inverse=np.arctan, radius=HALF_PI,
                dual_name="tanh", series=_tan_series, series_radius=HALF_PI),
    "sin": dict(f=np.sin, df=np.cos, inverse=np.arcsin, radius=HALF_PI, sup=1.0, dual_name="sinh",
                series=lambda k: (-1) ** k / math.factorial(2 * k + 1)),
    "gd": dict(f=_gd, df=lambda x: 1 / np.cosh(x), inverse=lambda y: np.arcsinh(np.tan(y)),
               sup=HALF_PI),
    "arcsinh": dict(f=np.arcsinh, df=lambda x: 1 / np.sqrt(1 + x * x), inverse=np.sinh,
                    dual_name="arcsin",
                    series=lambda k: (-1) ** k * _asin_series(k), series_radius=1.0),
    "artanh": dict(f=np.arctanh, df=lambda x: 1 / (1 - x * x), inverse=np.tanh, radius=1.0,
                   dual_name="arctan", series=lambda k: 1.0 / (2 * k + 1), series_radius=1.0),
    "arcsin": dict(f=np.arcsin, df=lambda x: 1 / np.sqrt(1 - x * x), inverse=np.sin, radius=1.0,
                   sup=HALF_PI, dual_name="arcsinh", series=_asin_series, series_radius=1.0),
    "arctan": dict(f=np.arctan, df=lambda x: 1 / (1 + x * x), inverse=np.tan, sup=HALF_PI,
                   dual_name="artanh",
                   series=lambda k: (-1) ** k / (2 * k + 1), series_radius=1.0),
    "sinh_artanh": dict(f=_sa, df=lambda x: (1 - x * x) ** -1.5,
                        inverse=lambda y: y / np.sqrt(1 + y * y), radius=1.0),
    "loi_mossa": dict(f=_lm, df=_lm_d, inverse=_lm_inv, dual_name="loi_mossa_dual"),
    "loi_mossa_dual": dict(f=_lmd, df=_lmd_d, inverse=_lmd_inv, radius=HALF_PI,
                           dual_name="loi_mossa"),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin_odd(name):
    if isinstance(name, OddMap):
        return name
    try:
        spec = _BUILTINS[name]
    except KeyError:
        raise UnknownName(f"unknown odd function {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return OddMap(name=name, **spec)


def series_map(coeffs, radius=np.inf, name="series"):
    """OddMap from a finite list a_k of coefficients of x^(2k+1)."""
    coeffs = tuple(float(a) for a in coeffs)
    if not coeffs or coeffs[0] == 0.0:
        raise ValueError("leading coefficient a_0 must be nonzero")
    c = coeffs

    def f(x):
        return _series_eval(c, x)

    def df(x):
        return _series_eval(c, x, deriv=True)

    grid = np.linspace(0, radius if np.isfinite(radius) else 50.0, 2001)[:-1] if np.isfinite(radius) \
        else None
    if np.isfinite(radius):
        sup = float(np.max(f(grid)))
    else:
        sup = np.inf if c[-1] > 0 else float(np.max(f(np.linspace(0, 50, 5001))))
    return OddMap(name=name, f=f, df=df, radius=float(radius), sup=sup,
                  series=lambda k: c[k] if k < len(c) else 0.0, series_radius=float(radius),
                  coeffs=c, injective=bool(np.all(df(np.linspace(0, min(radius, 50.0), 501)[:-1]) > 0)))


def dual_function(eta, nterms=None):
    """
    eta*(x) = -i eta(ix): wired closed form for builtins with a known dual,
    otherwise the series with coefficients a_k (-1)^k on radius min(R~, pi/2).
    """
    eta = builtin_odd(eta) if isinstance(eta, str) else eta
    if eta.dual_name is not None and eta.name in _BUILTINS:
        return builtin_odd(eta.dual_name)
    if eta.coeffs is not None:
        c = tuple(a * (-1) ** k for k, a in enumerate(eta.coeffs))
        return series_map(c, radius=min(eta.series_radius, HALF_PI), name=f"{eta.name}*")
    if eta.series is not None:
        n = nterms or 40
        c = tuple(eta.series(k) * (-1) ** k for k in range(n))
        return series_map(c, radius=min(eta.series_radius, HALF_PI), name=f"{eta.name}*")
    raise NoSeriesAvailable(f"{eta.name} has no power series; dual undefined")


def series_coefficients(eta, n):
    eta = builtin_odd(eta) if isinstance(eta, str) else eta
    if eta.series is None:
        raise NoSeriesAvailable(f"{eta.name} has no power series")
    return np.array([eta.series(k) for k in range(n)], dtype=float)


def compose(outer, inner, name=None):
    outer = builtin_odd(outer)
    inner = builtin_odd(inner)
    return OddMap(name=name or f"{outer.name}o{inner.name}",
                  f=lambda x: outer.f(inner.f(x)),
                  df=lambda x: outer.df(inner.f(x)) * inner.df(x),
                  inverse=(lambda y: inner.inverse(outer.inverse(y)))
                  if outer.inverse and inner.inverse else None,
                  radius=inner.radius)


def oddness_residual(eta, xs):
    xs = np.asarray(xs, dtype=float)
    return float(max(np.max(np.abs(eta(-xs) + eta(xs))), abs(float(eta(np.array(0.0))))))


def inverse_residual(eta, xs):
    if eta.inverse is None:
        return 0.0
    xs = np.asarray(xs, dtype=float)
    return float(np.max(np.abs(eta.inverse(eta(xs)) - xs)))


# ---- Jordan triple ----------------------------------------------------------

def _br(m, a, b):
    return np.einsum("i,j,ijk->k", a, b, m.struct)


def _J(sp, x):
    m = sp.model
    out = np.zeros(m.dim_g)
    out[m.p_slice] = sp.kahler.J0 @ x[m.p_slice]
    return out


def _triple(sp, u, v, w):
    m = sp.model
    t1 = _br(m, _br(m, u, v), w)
    t2 = _br(m, _br(m, u, _J(sp, v)), w)
    return 0.5 * (t1 + _J(sp, t2))


def triple_product(sp, u, v, w):
    """{u,v,w} = -1/2 (R(u,v)w + J0 R(u,J0 v)w), R(u,v)w = -[[u,v],w]."""
    m = sp.model
    return AlgVec(_triple(sp, m.coords(u), m.coords(v), m.coords(w)), m.p_tag, m.key)


def D_op(sp, u, v):
    """Matrix of D(u,v) = {u, v, .} on p-coordinates."""
    m = sp.model
    u, v = m.coords(u), m.coords(v)
    cols = []
    for j in range(m.dim_p):
        e = np.zeros(m.dim_g)
        e[m.dim_k + j] = 1.0
        cols.append(_triple(sp, u, v, e)[m.p_slice])
    return np.array(cols).T


def Q_op(sp, u):
    """Matrix of Q(u) = 1/2 {u, ., u} on p-coordinates (real-linear)."""
    m = sp.model
    u = m.coords(u)
    cols = []
    for j in range(m.dim_p):
        e = np.zeros(m.dim_g)
        e[m.dim_k + j] = 1.0
        cols.append(0.5 * _triple(sp, u, e, u)[m.p_slice])
    return np.array(cols).T


# ---- spectral decomposition ---------------------------------------------------

@dataclass(eq=False)
class SpectralDecomp:
    values: np.ndarray
    tripotents: list
    residuals: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)


def _groups(vals, rel):
    out, cur = [], [0]
    for i in range(1, len(vals)):
        if vals[i - 1] - vals[i] > rel * max(1.0, vals[0]):
            out.append(cur)
            cur = []
        cur.append(i)
    out.append(cur)
    return out


def _orbit_factors(m, X, floor):
    """(values, complex-coordinate tripotents) from SVD / Takagi, sorted descending."""
    Z = m.p_to_complex(X)
    if m.spec.is_su:
        U, s, Vh = np.linalg.svd(Z)
        keep = s > floor
        return s[keep], [np.outer(U[:, i], Vh[i, :]) for i in np.flatnonzero(keep)]
    R, I = Z.real, Z.imag
    M = np.block([[R, I], [I, -R]])
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    n = Z.shape[0]
    order = np.argsort(-w)
    vals, vecs = [], []
    for i in order:
        if w[i] <= floor:
            break
        u = V[:n, i] + 1j * V[n:, i]
        vals.append(w[i])
        vecs.append(u)
    return np.array(vals), [np.outer(u, u) for u in vecs]


def certificate(sp, X, values, tripotents, tol=DEFAULT):
    """Residuals of reconstruction, {c,c,c} = 2c and D(c_i, c_j) = 0."""
    m = sp.model
    x = m.coords(X)
    scale = max(1.0, float(np.linalg.norm(x)))
    tripotents = [m.coords(c) for c in tripotents]
    rec = x - sum((l * c for l, c in zip(values, tripotents)), np.zeros(m.dim_g))
    res = {"reconstruction": float(np.linalg.norm(rec)) / scale, "tripotent": 0.0, "orthogonal": 0.0}
    for i, c in enumerate(tripotents):
        res["tripotent"] = max(res["tripotent"], float(np.max(np.abs(_triple(sp, c, c, c) - 2 * c))))
        for j, d in enumerate(tripotents):
            if i != j:
                res["orthogonal"] = max(res["orthogonal"], float(np.max(np.abs(D_op(sp, c, d)))))
    return res


def spectral_decompose(sp, X, tol=DEFAULT, certify=True):
    """X = sum lambda_i c_i with lambda_1 > ... > lambda_p > 0 and orthogonal tripotents c_i."""
    m = sp.model
    x = m.coords(X)
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return SpectralDecomp(np.zeros(0), [], {"reconstruction": 0.0, "tripotent": 0.0,
                                                 "orthogonal": 0.0})
    vals, mats = _orbit_factors(m, x, floor=1e-14 * max(1.0, nx))
    values, trips = [], []
    if len(vals):
        for grp in _groups(vals, tol.spectral_merge):
            values.append(float(np.mean(vals[grp])))
            cm = sum(mats[i] for i in grp)
            trips.append(m.complex_to_p(cm))
    values = np.array(values)
    res = certificate(sp, x, values, [t.coeffs for t in trips], tol) if certify else {}
    if certify and (res["reconstruction"] > tol.reconstruction or res["tripotent"] > tol.certificate
                    or res["orthogonal"] > tol.certificate):
        raise CertificateFailure(f"spectral certificate failed: {res}")
    return SpectralDecomp(values, trips, res)


def spectral_values(sp, X):
    return spectral_decompose(sp, X, certify=False).values


# ---- odd functional calculus ---------------------------------------------------

def odd_calculus(sp, X, eta, tol=DEFAULT, certify=True, home=None):
    """sum eta(lambda_i) c_i for X = sum lambda_i c_i."""
    eta = builtin_odd(eta)
    m = sp.model
    sd = spectral_decompose(sp, X, tol, certify=certify)
    out = np.zeros(m.dim_g)
    if len(sd.values) and sd.values[0] >= eta.radius:
        raise DomainExceeded(f"spectral value {sd.values[0]:.6g} outside the domain of {eta.name} "
                             f"(radius {eta.radius:.6g})")
    for l, c in zip(sd.values, sd.tripotents):
        out += float(eta(l)) * c.coeffs
    return AlgVec(out, home or m.p_tag, m.key)


def harish_chandra(sp, X, **kw):
    return odd_calculus(sp, X, "tanh", **kw)


def symplecto(sp, X, **kw):
    return odd_calculus(sp, X, "sinh", **kw)


def _signed(fn):
    def g(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * fn(np.abs(x))
    return g


DL = OddMap("diastatic_log", _signed(lambda a: np.sqrt(-np.log1p(-a * a))),
            lambda x: np.abs(x) / ((1 - x * x) * np.sqrt(-np.log1p(-x * x))), radius=1.0)
DE = OddMap("diastatic_exp", _signed(lambda a: np.sqrt(-np.expm1(-a * a))),
            lambda x: np.abs(x) * np.exp(-x * x) / np.sqrt(-np.expm1(-x * x)), sup=1.0)


def diastatic_log(sp, Z, **kw):
    """sum sqrt(-log(1 - l_i^2)) c_i, defined for spectral values < 1."""
    return odd_calculus(sp, Z, DL, **kw)


def diastatic_exp(sp, X, **kw):
    """sum sqrt(1 - exp(-l_i^2)) c_i, inverse of diastatic_log."""
    return odd_calculus(sp, X, DE, **kw)


# ---- Bergman operator ------------------------------------------------------------

def bergman_operator(sp, z, w=None):
    """B(z, w) = Id - D(z, w) + Q(z) Q(w) on p-coordinates; w defaults to z."""
    m = sp.model
    w = z if w is None else w
    return np.eye(m.dim_p) - D_op(sp, z, w) + Q_op(sp, z) @ Q_op(sp, w)


def operator_power(B, power, floor=DEFAULT.eig_floor):
    S = 0.5 * (B + B.T)
    w, V = np.linalg.eigh(S)
    if np.min(w) <= floor:
        raise NotPositiveDefinite(f"smallest eigenvalue {np.min(w):.3e} <= {floor:.1e}")
    return (V * w ** power) @ V.T


def dsl_roos_map(sp, z):
    """B(z, z)^(-1/4) z for z in the bounded domain (spectral values < 1)."""
    m = sp.model
    B = bergman_operator(sp, z)
    P = operator_power(B, -0.25)
    out = np.zeros(m.dim_g)
    out[m.p_slice] = P @ m.pc(z)
    return AlgVec(out, m.p_tag, m.key)


def gudermann_composite(sp, X, path="arctan_sinh", **kw):
    """odd_calculus(X, gd) re-tagged into p* coordinates."""
    if path == "arcsin_tanh":
        eta = compose("arcsin", "tanh", name="gd")
    else:
        eta = builtin_odd("gd")
    return odd_calculus(sp, X, eta, home="p*", **kw)


def domain_membership(sp, w, eta):
    eta = builtin_odd(eta)
    vals = spectral_values(sp, w)
    return bool(len(vals) == 0 or vals[0] < eta.sup)


# ---- general h-maps ----------------------------------------------------------------

@dataclass(eq=False)
class GeneralHMap:
    h: Callable
    r: int
    name: str = "h"

    def __call__(self, x):
        return float(self.h(np.asarray(x, dtype=float)))


def _swap(x, i, j):
    y = np.array(x, dtype=float)
    y[i], y[j] = y[j], y[i]
    return y


def general_h_map(hm, x):
    """a-coefficients of sum_i h(p_{1i} x) H~_i."""
    x = np.asarray(x, dtype=float)
    if x.shape != (hm.r,):
        raise RankMismatch(f"h-map of rank {hm.r} applied to {x.shape}")
    return np.array([hm(_swap(x, 0, i)) for i in range(hm.r)])


def check_h_conditions(hm, samples):
    """Max violation of (a) oddness in x_1 and (b) evenness / symmetry in x_2..x_r."""
    worst_a = worst_b = 0.0
    for x in np.atleast_2d(samples):
        fx = hm(x)
        y = x.copy()
        y[0] = -y[0]
        worst_a = max(worst_a, abs(hm(y) + fx))
        for j in range(1, hm.r):
            y = x.copy()
            y[j] = -y[j]
            worst_b = max(worst_b, abs(hm(y) - fx))
            for i in range(1, j):
                worst_b = max(worst_b, abs(hm(_swap(x, i, j)) - fx))
    return {"odd_in_x1": float(worst_a), "even_symmetric_rest": float(worst_b),
            "max": float(max(worst_a, worst_b))}
