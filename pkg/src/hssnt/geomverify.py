"""
Chart Kahler structures and numerical certification of realization maps.

In the exponential chart v -> Exp(v) the pulled-back complex structure and
Kahler form at v are E_v^-1 J0 E_v and E_v^T Omega0 E_v, where
E_v = phi(ad(v)^2 | p) is the Jacobi operator.  A chart map F is holomorphic
iff dF J_chart = J0 dF, and symplectic iff dF^T Omega0 dF = E^T Omega0 E.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm

from .dual import dual_of
from .errors import NonPrincipalPoint, OutsideCutLocus, SingularJacobi
from .realize import HALF_PI, GeneralHMap, OddMap, builtin_odd, general_h_map, odd_calculus
from .tolerances import DEFAULT

SERIES_CUTOFF = 1e-6

MAP_ALIASES = {
    "harish_chandra": "tanh",
    "symplecto": "sinh",
    "identity": "id",
    "log": "id",
}


# ---- Jacobi operator and chart structures -----------------------------------------

def jacobi_phi(t):
    """sinh(sqrt t)/sqrt t, continued as sin(sqrt -t)/sqrt -t for t < 0."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = np.abs(t) < SERIES_CUTOFF
    ts = t[small]
    out[small] = 1.0 + ts / 6.0 + ts * ts / 120.0
    pos = t >= SERIES_CUTOFF
    s = np.sqrt(t[pos])
    out[pos] = np.sinh(s) / s
    neg = t <= -SERIES_CUTOFF
    s = np.sqrt(-t[neg])
    out[neg] = np.sin(s) / s
    return out


def _model(sp, dual):
    return dual_of(sp).model if dual else sp.model


def _pcoords(sp, v):
    m = sp.model
    c = np.asarray(v, dtype=float)
    if c.shape == (m.dim_p,):
        return c
    return m.coords(c)[m.p_slice]


def ad_squared_p(sp, v, dual=False):
    """ad(v)^2 restricted to p (or p*), symmetric."""
    m = _model(sp, dual)
    full = np.zeros(m.dim_g)
    full[m.p_slice] = _pcoords(sp, v)
    A = np.tensordot(full, m.ad_basis, axes=1)
    T = A[m.p_slice, m.k_slice] @ A[m.k_slice, m.p_slice]
    return 0.5 * (T + T.T)


def jacobi_operator(sp, v, dual=False, floor=DEFAULT.eig_floor):
    w, V = np.linalg.eigh(ad_squared_p(sp, v, dual))
    ph = jacobi_phi(w)
    if np.min(ph) <= floor:
        raise SingularJacobi(f"Jacobi factor {np.min(ph):.3e} vanishes: point on or past the cut locus")
    return (V * ph) @ V.T


@dataclass(eq=False)
class ChartKahler:
    v: np.ndarray
    E: np.ndarray
    J: np.ndarray
    omega: np.ndarray
    dual: bool = False

    def residuals(self):
        n = len(self.v)
        return {"J_squared": float(np.max(np.abs(self.J @ self.J + np.eye(n)))),
                "omega_antisym": float(np.max(np.abs(self.omega + self.omega.T)))}


def chart_kahler(sp, v, dual=False):
    v = _pcoords(sp, v)
    E = jacobi_operator(sp, v, dual)
    J0 = sp.J0
    return ChartKahler(v=v, E=E, J=np.linalg.solve(E, J0 @ E), omega=E.T @ J0.T @ E, dual=dual)


# ---- chart maps ---------------------------------------------------------------------

@dataclass(eq=False)
class ChartMap:
    name: str
    fn: Callable            # p-coords -> p-coords
    eta: Optional[OddMap] = None


def resolve_map(sp, spec):
    """Accept a builtin odd-function name, an alias, an OddMap or a callable on p-coordinates."""
    if isinstance(spec, ChartMap):
        return spec
    if callable(spec) and not isinstance(spec, (OddMap, str)):
        return ChartMap(getattr(spec, "__name__", "map"), spec)
    name = spec if isinstance(spec, str) else spec.name
    eta = builtin_odd(MAP_ALIASES.get(spec, spec) if isinstance(spec, str) else spec)
    m = sp.model

    def fn(x):
        return odd_calculus(sp, m.vec(x), eta, certify=False).coeffs[m.p_slice]

    return ChartMap(name, fn, eta)


# ---- finite differences -------------------------------------------------------------

def _stencil(fn, x, u, h):
    return (-fn(x + 2 * h * u) + 8 * fn(x + h * u) - 8 * fn(x - h * u) + fn(x - 2 * h * u)) / (12 * h)


def fd_step(x):
    return 1e-4 * max(1.0, float(np.linalg.norm(x)))


def fd_directional(fn, x, u, h=None):
    """Richardson-combined order-4 derivative and the (h, h/2) disagreement."""
    h = h or fd_step(x)
    d1 = _stencil(fn, x, u, h)
    d2 = _stencil(fn, x, u, h / 2)
    return (16 * d2 - d1) / 15, float(np.max(np.abs(d1 - d2)))


def fd_jacobian(fn, x, h=None):
    x = np.asarray(x, dtype=float)
    n = len(x)
    cols, gap = [], 0.0
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        d, g = fd_directional(fn, x, e, h)
        cols.append(d)
        gap = max(gap, g)
    return np.array(cols).T, gap


# ---- principal points -----------------------------------------------------------------

def a_norm(sp, x):
    return float(np.sqrt(4.0 / sp.C) * np.linalg.norm(x))


def is_principal(sp, x, rel=DEFAULT.principal):
    x = np.asarray(x, dtype=float)
    thr = rel * a_norm(sp, x)
    return all(abs(a(x)) > thr for a in sp.datum.positive) and a_norm(sp, x) > 0


def _axis_coords(sp, X):
    """a-coordinates of X, or NonPrincipalPoint if X leaves a."""
    if isinstance(X, (list, tuple)) or (np.ndim(X) == 1 and len(X) == sp.rank):
        return np.asarray(X, dtype=float)
    m = sp.model
    full = np.zeros(m.dim_g)
    full[m.p_slice] = _pcoords(sp, X)
    x = sp.a_coords(full)
    if np.max(np.abs(sp.from_a(x).coeffs - full)) > 1e-10 * max(1.0, np.max(np.abs(full))):
        raise NonPrincipalPoint("point is not in the maximal abelian subspace a")
    return x


def _require_principal(sp, x, rel=1e-12):
    thr = rel * max(1.0, a_norm(sp, x))
    bad = [a.label for a in sp.datum.positive if abs(a(x)) <= thr]
    if bad:
        raise NonPrincipalPoint(f"roots {bad} vanish at {np.round(x, 12).tolist()}")


# ---- differentials -----------------------------------------------------------------

def differential(sp, fmap, X, u, mode="finite_diff", dual=False):
    """dF_X(u) as p-coordinates; exact_axis needs X principal in a and an odd-function map."""
    m = sp.model
    u = _pcoords(sp, u)
    if mode == "finite_diff":
        cm = resolve_map(sp, fmap)
        d, _ = fd_directional(cm.fn, _pcoords(sp, X), u)
        return d
    if mode != "exact_axis":
        raise ValueError(f"unknown differential mode {mode!r}")
    cm = resolve_map(sp, fmap)
    if cm.eta is None:
        raise ValueError("exact_axis needs an odd-function map")
    eta = cm.eta
    x = _axis_coords(sp, X)
    _require_principal(sp, x)
    if dual and np.max(np.abs(x)) >= HALF_PI:
        raise OutsideCutLocus("point outside the cut cube")
    w = eta(x)
    full = np.zeros(m.dim_g)
    full[m.p_slice] = u
    out = np.zeros(m.dim_p)
    ua = sp.a_coords(full)
    out += (eta.deriv(x) * ua) @ sp.H_tilde[:, m.p_slice]
    sh = np.sin if dual else np.sinh
    for a in sp.datum.positive:
        P = a.p_basis[:, m.p_slice]
        av, aw = a(x), a(w)
        # pushed block factor times Jacobi factor: alpha(w)/sh(alpha(v)) * sh(alpha(v))/alpha(v)
        factor = (aw / sh(av)) * (sh(av) / av)
        out += factor * (P.T @ (P @ u))
    return out


# ---- block scalars G and F -----------------------------------------------------------

def _root_and_coords(sp, eta, alpha, v, star):
    eta = builtin_odd(MAP_ALIASES.get(eta, eta) if isinstance(eta, str) else eta)
    a = sp.datum.root(alpha)
    if not a.positive:
        a = sp.datum.root(a.label[1:])
    x = _axis_coords(sp, v)
    _require_principal(sp, x)
    if star and np.max(np.abs(x)) >= HALF_PI:
        raise OutsideCutLocus(f"{np.round(x, 6).tolist()} outside the cut cube")
    return eta, a, x


def _GF(sp, eta, alpha, v, star):
    eta, a, x = _root_and_coords(sp, eta, alpha, v, star)
    sh = np.sin if star else np.sinh
    w = eta(x)
    if a.kind == "gamma":
        i = int(np.argmax(np.abs(a.coeffs)))
        xi = x[i]
        G = eta.deriv(xi) / eta(xi) * sh(2 * xi) / 2
        F = sh(2 * xi) / (2 * eta.deriv(xi) * eta(xi))
    elif a.kind in ("lambda", "lambda_bar"):
        b = sp.datum.bar(a)
        G = (b(w) / a(w)) * (sh(a(x)) / sh(b(x)))
        F = sh(a(x)) * sh(b(x)) / (a(w) * b(w))
    else:
        G = 1.0
        F = sh(a(x)) ** 2 / a(w) ** 2
    return float(G), float(F)


def evaluate_G(sp, eta, alpha, v):
    return _GF(sp, eta, alpha, v, False)[0]


def evaluate_F(sp, eta, alpha, v):
    return _GF(sp, eta, alpha, v, False)[1]


def evaluate_G_star(sp, eta, alpha, v):
    return _GF(sp, eta, alpha, v, True)[0]


def evaluate_F_star(sp, eta, alpha, v):
    return _GF(sp, eta, alpha, v, True)[1]


def tanh_F_closed_form(sp, alpha, v):
    """cosh^2((a+abar)/2) cosh^2((a-abar)/2), abar = 0 on Gamma and = a on E."""
    a = sp.datum.root(alpha)
    x = _axis_coords(sp, v)
    av = a(x)
    if a.kind == "gamma":
        bv = 0.0
    elif a.kind == "eps":
        bv = av
    else:
        bv = sp.datum.bar(a)(x)
    return float(np.cosh((av + bv) / 2) ** 2 * np.cosh((av - bv) / 2) ** 2)


def block_scalars(sp, eta, v, dual=False):
    """
    Finite-difference pullbacks of the chart structures through Omega_eta at v in a,
    read off on every p_alpha: J_w X = G J0 X and omega_w(X, J0 X) = F.
    Returns rows (label, G_num, G_formula, F_num, F_formula, block_residual).
    """
    m = sp.model
    x = _axis_coords(sp, v)
    cm = resolve_map(sp, eta)
    v = sp.from_a(x).coeffs[m.p_slice]
    dF, _ = fd_jacobian(cm.fn, v)
    ck = chart_kahler(sp, v, dual)
    inv = np.linalg.inv(dF)
    Jw = dF @ ck.J @ inv
    Ow = inv.T @ ck.omega @ inv
    rows = []
    for a in sp.datum.positive:
        Gf, Ff = _GF(sp, cm.eta, a, x, dual)
        for X in a.p_basis[:, m.p_slice]:
            X = X / np.linalg.norm(X)
            Y = sp.J0 @ X
            JX = Jw @ X
            Gn = float(Y @ JX)
            block = float(np.linalg.norm(JX - Gn * Y))
            Fn = float(X @ Ow @ Y) / float(X @ sp.J0.T @ Y)
            rows.append((a.label, Gn, Gf, Fn, Ff, block))
    return rows


def block_scalar_gap(rows):
    g = max(abs(r[1] - r[2]) / max(1.0, abs(r[2])) for r in rows)
    f = max(abs(r[3] - r[4]) / max(1.0, abs(r[4])) for r in rows)
    b = max(r[5] for r in rows)
    return {"G": g, "F": f, "block": b}


# ---- uniqueness ODE -------------------------------------------------------------------

def uniqueness_residuals(eta, xs=None):
    """max |eta'/eta sinh(2x)/2 - 1| and max |sinh(2x)/(2 eta' eta) - 1| on a grid in (0, R)."""
    eta = builtin_odd(eta)
    xs = np.linspace(0.1, 2.0, 191) if xs is None else np.asarray(xs, dtype=float)
    xs = xs[xs < 0.999 * eta.radius]
    f, df = eta(xs), eta.deriv(xs)
    s = np.sinh(2 * xs) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        rG = np.abs(df / f * s - 1)
        rF = np.abs(s / (df * f) - 1)
    rG = np.where(np.isfinite(rG), rG, np.inf)
    rF = np.where(np.isfinite(rF), rF, np.inf)
    return {"G": float(np.max(rG)), "F": float(np.max(rF))}


# ---- reports ----------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    max_residual: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.tol)

    def to_dict(self):
        return {"name": self.name, "max_residual": float(self.max_residual),
                "tol": float(self.tol), "pass": self.passed}


@dataclass
class VerifyReport:
    map_name: str
    n_samples: int
    seed: int
    space: str = ""
    checks: list = field(default_factory=list)

    def add(self, name, residual, tol):
        self.checks.append(CheckResult(name, float(residual), float(tol)))
        return self

    def extend(self, other):
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"map": self.map_name, "space": self.space, "samples": self.n_samples,
                "seed": self.seed, "pass": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


# ---- sampling and parallel evaluation --------------------------------------------------

def _threads():
    try:
        cap = int(os.environ.get("HSSNT_THREADS", "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(n, cap) if cap > 0 else n)


def pmap(fn, items):
    """Map over samples, possibly threaded; results keep sample order."""
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def default_max_value(eta=None, dual=False):
    top = 1.2 if dual else 2.0
    if eta is not None and np.isfinite(eta.radius):
        top = min(top, 0.95 * eta.radius)
    return top


def sample_axis(sp, rng, max_val=2.0, min_val=1e-3, rel=DEFAULT.principal):
    while True:
        x = rng.uniform(min_val, max_val, sp.rank) * rng.choice([-1.0, 1.0], sp.rank)
        if is_principal(sp, x, rel):
            return x


def sample_points(sp, n, seed=0, max_val=2.0, min_val=1e-3, generic=True):
    """Principal samples: (a-coords, p-coords of Ad(k) v) with spectral values in (min_val, max_val)."""
    rng = np.random.default_rng(seed)
    m = sp.model
    out = []
    for _ in range(n):
        x = sample_axis(sp, rng, max_val, min_val)
        v = sp.from_a(x).coeffs
        if generic:
            v = expm(np.tensordot(m.random_k(rng).coeffs, m.ad_basis, axes=1)) @ v
        out.append((x, v[m.p_slice]))
    return out


# ---- certification ---------------------------------------------------------------------

def _prep(sp, fmap, dual, max_val):
    cm = resolve_map(sp, fmap)
    return cm, (max_val if max_val is not None else default_max_value(cm.eta, dual))


def check_holomorphic(sp, fmap, target_J=None, n_samples=20, seed=0, tol=1e-5, dual=False,
                      max_val=None):
    cm, top = _prep(sp, fmap, dual, max_val)
    TJ = sp.J0 if target_J is None else np.asarray(target_J)
    pts = sample_points(sp, n_samples, seed, top)

    def one(pt):
        _, X = pt
        dF, gap = fd_jacobian(cm.fn, X)
        ck = chart_kahler(sp, X, dual)
        return np.linalg.norm(dF @ ck.J - TJ @ dF, 2), gap

    res = pmap(one, pts)
    rep = VerifyReport(cm.name, n_samples, seed, sp.model.key + ("*" if dual else ""))
    rep.add("holomorphic", max(r[0] for r in res), tol)
    rep.add("fd_richardson", max(r[1] for r in res), tol)
    return rep


def check_symplectic(sp, fmap, target_omega=None, n_samples=20, seed=0, tol=1e-5, dual=False,
                     max_val=None):
    cm, top = _prep(sp, fmap, dual, max_val)
    TO = sp.J0.T if target_omega is None else np.asarray(target_omega)
    pts = sample_points(sp, n_samples, seed, top)

    def one(pt):
        _, X = pt
        dF, gap = fd_jacobian(cm.fn, X)
        ck = chart_kahler(sp, X, dual)
        return np.linalg.norm(dF.T @ TO @ dF - ck.omega, 2), gap

    res = pmap(one, pts)
    rep = VerifyReport(cm.name, n_samples, seed, sp.model.key + ("*" if dual else ""))
    rep.add("symplectic", max(r[0] for r in res), tol)
    rep.add("fd_richardson", max(r[1] for r in res), tol)
    return rep


def realized_reflection(sp, alpha):
    """Ad(exp(t Z)) with Z a unit vector of k_alpha and t = pi/|H_alpha|; acts on a as rho_alpha."""
    m = sp.model
    a = sp.datum.root(alpha)
    Z = a.k_basis[0] / np.linalg.norm(a.k_basis[0])
    t = np.pi / np.linalg.norm(a.H)
    return expm(t * np.tensordot(Z, m.ad_basis, axes=1))


def weyl_realization_residual(sp):
    from .roots import reflection_matrix
    worst = 0.0
    for a in sp.datum.positive:
        A = realized_reflection(sp, a)
        img = np.array([sp.a_coords(A @ Ht) for Ht in sp.H_tilde]).T
        off = max(np.max(np.abs(A @ Ht - sp.from_a(sp.a_coords(A @ Ht)).coeffs)) for Ht in sp.H_tilde)
        worst = max(worst, float(np.max(np.abs(img - reflection_matrix(sp.datum, a)))), float(off))
    return worst


def check_equivariance(sp, fmap, n_samples=20, seed=0, tol=1e-9, max_val=2.0):
    """F(Ad(k) X) = Ad(k) F(X); h-maps are tested against realized Weyl reflections."""
    m = sp.model
    rng = np.random.default_rng(seed)
    if isinstance(fmap, GeneralHMap):
        refl = [realized_reflection(sp, a) for a in sp.datum.positive]
        xs = [sample_axis(sp, rng, max_val) for _ in range(n_samples)]

        def one(x):
            worst = 0.0
            hx = sp.from_a(general_h_map(fmap, x)).coeffs
            for A in refl:
                y = sp.a_coords(A @ sp.from_a(x).coeffs)
                lhs = general_h_map(fmap, y)
                rhs = sp.a_coords(A @ hx)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            return worst

        rep = VerifyReport(fmap.name, n_samples, seed, m.key)
        rep.add("weyl_realization", weyl_realization_residual(sp), tol)
        rep.add("weyl_equivariance", max(pmap(one, xs)), tol)
        return rep

    cm = resolve_map(sp, fmap)
    top = default_max_value(cm.eta) if max_val is None else min(max_val, default_max_value(cm.eta))
    items = []
    for x, X in sample_points(sp, n_samples, seed, top, generic=True):
        items.append((X, expm(np.tensordot(m.random_k(rng).coeffs, m.ad_basis, axes=1))))

    def one(item):
        X, A = item
        AX = (A @ m.coords(X))[m.p_slice]
        FX = np.zeros(m.dim_g)
        FX[m.p_slice] = cm.fn(X)
        return float(np.max(np.abs(cm.fn(AX) - (A @ FX)[m.p_slice])))

    rep = VerifyReport(cm.name, n_samples, seed, m.key)
    rep.add("equivariance", max(pmap(one, items)), tol)
    return rep


def check_block_scalars(sp, eta, n_samples=5, seed=0, tol=1e-5, dual=False):
    """Finite-difference G/F on every root block against the closed forms."""
    eta_map = builtin_odd(MAP_ALIASES.get(eta, eta) if isinstance(eta, str) else eta)
    rng = np.random.default_rng(seed)
    top = default_max_value(eta_map, dual)
    xs = [sample_axis(sp, rng, top, min_val=0.05) for _ in range(n_samples)]
    gaps = pmap(lambda x: block_scalar_gap(block_scalars(sp, eta_map, x, dual)), xs)
    rep = VerifyReport(eta_map.name, n_samples, seed, sp.model.key + ("*" if dual else ""))
    for k in ("G", "F", "block"):
        rep.add(f"block_{k}", max(g[k] for g in gaps), tol)
    return rep


def exact_vs_fd(sp, eta, n_samples=20, seed=0, tol=1e-5, dual=False):
    """exact_axis against finite differences on every p basis direction."""
    eta_map = builtin_odd(MAP_ALIASES.get(eta, eta) if isinstance(eta, str) else eta)
    rng = np.random.default_rng(seed)
    top = default_max_value(eta_map, dual)
    xs = [sample_axis(sp, rng, top, min_val=0.05) for _ in range(n_samples)]
    m = sp.model

    def one(x):
        v = sp.from_a(x).coeffs[m.p_slice]
        worst = 0.0
        for i in range(m.dim_p):
            u = np.zeros(m.dim_p)
            u[i] = 1.0
            ex = differential(sp, eta_map, x, u, "exact_axis", dual)
            fd = differential(sp, eta_map, v, u, "finite_diff")
            worst = max(worst, float(np.max(np.abs(ex - fd))))
        return worst

    rep = VerifyReport(eta_map.name, n_samples, seed, m.key)
    rep.add("exact_vs_fd", max(pmap(one, xs)), tol)
    return rep
