"""
Compact dual g* = k + p*, with p* = i p stored as re-tagged p coordinates.

Only the bracket changes: [X*, Y*] = -[X, Y] on p* x p*, while brackets
with k are unchanged.  The iota identification p -> p* is the identity on
coefficients.
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .algebra import AlgVec, _killing_from, bracket, jacobi_residual
from .errors import OutsideCutLocus
from .realize import HALF_PI, OddMap, _signed, builtin_odd, odd_calculus, spectral_values
from .tolerances import DEFAULT


@dataclass(eq=False)
class DualSpace:
    model: object        # ModelData of g* (p_tag 'p*')
    primary: object      # the Space of g
    J0: np.ndarray
    omega0: np.ndarray

    @property
    def datum(self):
        return self.primary.datum

    @property
    def rank(self):
        return self.primary.rank

    @property
    def H_tilde(self):
        return self.primary.H_tilde

    def from_a(self, x):
        v = self.primary.from_a(x)
        return AlgVec(v.coeffs, "p*", self.model.key)


def build_dual(sp):
    m = sp.model
    st = m.struct.copy()
    p = m.p_slice
    st[p, p, :] *= -1.0
    killing, ad = _killing_from(st)
    killing = 0.5 * (killing + killing.T)
    dm = replace(m, struct=st, killing=killing, inner=-killing, ad_basis=ad,
                 theta=np.ones(m.dim_g), key=m.key + "*", p_tag="p*")
    zeta = sp.kahler.zeta.coeffs
    J0 = np.tensordot(zeta, ad, axes=1)[p, p]
    return DualSpace(model=dm, primary=sp, J0=J0, omega0=J0.T.copy())


@lru_cache(maxsize=32)
def _dual_cached(key):
    from .space import build_space
    return build_dual(build_space(key))


def dual_of(sp):
    """Cached compact dual of a Space (or spec string)."""
    key = sp if isinstance(sp, str) else sp.model.key
    return _dual_cached(key)


def iota(dsp, X):
    """p -> p*, identity on coefficients."""
    return AlgVec(np.asarray(X, dtype=float), "p*", dsp.model.key)


def iota_inv(dsp, Xs):
    return AlgVec(np.asarray(Xs, dtype=float), "p", dsp.primary.model.key)


def cut_cube_membership(x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return bool(np.all(np.abs(x) < HALF_PI))


def omega_eta_star(dsp, Xs, eta_star, tol=DEFAULT, **kw):
    """Dual strongly diagonal map in the chart: decompose iota^-1 X*, apply eta*, re-tag."""
    eta_star = builtin_odd(eta_star)
    X = iota_inv(dsp, Xs)
    vals = spectral_values(dsp.primary, X)
    if len(vals) and vals[0] >= HALF_PI:
        raise OutsideCutLocus(f"spectral value {vals[0]:.6g} >= pi/2")
    out = odd_calculus(dsp.primary, X, eta_star, tol=tol, **kw)
    return iota(dsp, out.coeffs)


DL_STAR = OddMap("diastatic_log_dual", _signed(lambda a: np.sqrt(np.log1p(a * a))),
                 lambda x: np.abs(x) / ((1 + x * x) * np.sqrt(np.log1p(x * x))))
DE_STAR = OddMap("diastatic_exp_dual", _signed(lambda a: np.sqrt(np.expm1(a * a))),
                 lambda x: np.abs(x) * np.exp(x * x) / np.sqrt(np.expm1(x * x)))


def diastatic_log_dual(dsp, Zs, **kw):
    """sum sqrt(log(1 + l_i^2)) c_i*."""
    return iota(dsp, odd_calculus(dsp.primary, iota_inv(dsp, Zs), DL_STAR, **kw).coeffs)


def diastatic_exp_dual(dsp, Xs, **kw):
    """sum sqrt(exp(l_i^2) - 1) c_i*, inverse of diastatic_log_dual."""
    return iota(dsp, odd_calculus(dsp.primary, iota_inv(dsp, Xs), DE_STAR, **kw).coeffs)


# ---- residuals ----------------------------------------------------------------------

def dual_jacobi_residual(dsp):
    return jacobi_residual(dsp.model)


def dual_inner_min_eig(dsp):
    return float(np.min(np.linalg.eigvalsh(dsp.model.inner)))


def feq2_dual_residual(dsp):
    """[H*, X^k] = alpha(H) X^p* and [H*, X^p*] = -alpha(H) X^k on every positive root."""
    dm, d = dsp.model, dsp.datum
    worst = 0.0
    for i in range(d.rank):
        Ht = AlgVec(d.H_tilde[i], "p*", dm.key)
        for a in d.positive:
            val = a.coeffs[i]
            for Xk, Xp in zip(a.Xk, a.Xp):
                r1 = bracket(dm, Ht, AlgVec(Xk, "k", dm.key)).coeffs - val * Xp
                r2 = bracket(dm, Ht, AlgVec(Xp, "p*", dm.key)).coeffs + val * Xk
                worst = max(worst, np.max(np.abs(r1)), np.max(np.abs(r2)))
    return float(worst)


def dual_root_residual(dsp):
    """ad*(H~_i*)^2 has spectrum {-alpha(H~_i)^2} with multiplicity: roots become imaginary."""
    dm, d = dsp.model, dsp.datum
    worst = 0.0
    for i in range(d.rank):
        A = np.tensordot(d.H_tilde[i], dm.ad_basis, axes=1)
        ev = np.sort(np.linalg.eigvalsh(0.5 * (A @ A + (A @ A).T)))
        expect = [0.0] * (dm.dim_g - 2 * sum(a.mult for a in d.positive))
        for a in d.positive:
            expect += [-(a.coeffs[i] ** 2)] * (2 * a.mult)
        worst = max(worst, float(np.max(np.abs(ev - np.sort(expect)))))
    return worst


def dual_polydisk_residual(dsp):
    """Sign-flipped su(2) relations: [[H*, J H*], J H*] = -4 H*, [[H*, J H*], H*] = 4 J H*."""
    dm, d = dsp.model, dsp.datum
    p = dm.p_slice
    worst = 0.0
    for i in range(d.rank):
        H = d.H_tilde[i]
        JH = np.zeros(dm.dim_g)
        JH[p] = dsp.J0 @ H[p]
        Hs, JHs = AlgVec(H, "p*", dm.key), AlgVec(JH, "p*", dm.key)
        B = bracket(dm, Hs, JHs)
        worst = max(worst, np.max(np.abs(bracket(dm, B, JHs).coeffs + 4 * H)),
                    np.max(np.abs(bracket(dm, B, Hs).coeffs - 4 * JH)))
    return float(worst)
