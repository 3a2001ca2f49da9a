"""
Concrete real Lie algebras g = k + p for su(p,q) and sp(n,R).

Each model is stored as a real basis of matrices, orthonormal for the
inner product <X, Y> = -B(X, theta Y), with the k-part first and the
p-part last.  Structure constants, the Killing form and the Cartan
involution are tabulated from that basis; nothing downstream touches the
matrices except the spectral decomposition, which reads the complex
coordinate of a p-element (the off-diagonal block for su(p,q), the complex
symmetric matrix A + iB for sp(n,R)).
"""

import enum
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import InvalidSpec, ModelMismatch
from .tolerances import DEFAULT


class Family(enum.Enum):
    SU_PQ = "su"
    SP_N_R = "sp"
    SU_11 = "su11"


@dataclass(frozen=True)
class SpaceSpec:
    family: Family
    params: tuple

    def __post_init__(self):
        fam, par = self.family, tuple(int(x) for x in self.params)
        if fam is Family.SU_11:
            if par not in ((), (1, 1)):
                raise InvalidSpec("SU_11 takes no parameters other than (1, 1)")
            par = (1, 1)
        elif fam is Family.SU_PQ:
            if len(par) != 2:
                raise InvalidSpec("SU_PQ needs two parameters (p, q)")
            p, q = par
            if p < 1 or q < p:
                raise InvalidSpec(f"SU_PQ needs 1 <= p <= q, got {par}")
        elif fam is Family.SP_N_R:
            if len(par) != 1 or par[0] < 1:
                raise InvalidSpec(f"SP_N_R needs a single n >= 1, got {par}")
        object.__setattr__(self, "params", par)

    @classmethod
    def parse(cls, text):
        """Parse strings such as 'su:2,2', 'su:1,1', 'su11', 'sp:3'."""
        s = str(text).strip().lower().replace(" ", "")
        if s in ("su11", "su:11", "su11:"):
            return cls(Family.SU_11, ())
        m = re.fullmatch(r"(su|sp):(\d+(?:,\d+)*)", s)
        if not m:
            raise InvalidSpec(f"cannot parse space {text!r}; expected e.g. 'su:2,2' or 'sp:3'")
        nums = tuple(int(x) for x in m.group(2).split(","))
        fam = Family.SU_PQ if m.group(1) == "su" else Family.SP_N_R
        return cls(fam, nums)

    @property
    def key(self):
        if self.family is Family.SP_N_R:
            return f"sp:{self.params[0]}"
        return "su:%d,%d" % self.params

    @property
    def label(self):
        if self.family is Family.SP_N_R:
            return f"sp({self.params[0]},R)"
        return "su(%d,%d)" % self.params

    @property
    def is_su(self):
        return self.family in (Family.SU_PQ, Family.SU_11)

    @property
    def matrix_size(self):
        return sum(self.params) if self.is_su else 2 * self.params[0]

    @property
    def rank(self):
        return self.params[0]


class AlgVec:
    """Coordinates of an element of g (length dim_g) with a home-space tag."""

    __slots__ = ("coeffs", "home", "model")
    __array_priority__ = 20

    def __init__(self, coeffs, home="g", model=None):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.home = home
        self.model = model

    def __array__(self, dtype=None, copy=None):
        return self.coeffs if dtype is None else self.coeffs.astype(dtype)

    def _wrap(self, c, home=None):
        return AlgVec(c, self.home if home is None else home, self.model)

    def _other(self, o):
        if isinstance(o, AlgVec):
            if self.model and o.model and self.model != o.model:
                raise ModelMismatch(f"{self.model} vs {o.model}")
            return o.coeffs, (self.home if o.home == self.home else "g")
        return np.asarray(o, dtype=float), self.home

    def __add__(self, o):
        c, h = self._other(o)
        return self._wrap(self.coeffs + c, h)

    __radd__ = __add__

    def __sub__(self, o):
        c, h = self._other(o)
        return self._wrap(self.coeffs - c, h)

    def __rsub__(self, o):
        c, h = self._other(o)
        return self._wrap(c - self.coeffs, h)

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __mul__(self, s):
        return self._wrap(self.coeffs * float(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self._wrap(self.coeffs / float(s))

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"AlgVec({np.array2string(self.coeffs, precision=4)}, home={self.home!r})"

    def norm(self):
        return float(np.linalg.norm(self.coeffs))


def _e(n, i, j, dtype=complex):
    m = np.zeros((n, n), dtype=dtype)
    m[i, j] = 1
    return m


def _traceless_diagonals(n):
    # orthonormal basis of {d in R^n : sum d = 0}, Gell-Mann style
    out = []
    for j in range(1, n):
        d = np.zeros(n)
        d[:j] = 1.0
        d[j] = -j
        out.append(d / np.sqrt(j * (j + 1)))
    return out


def _su_pq_basis(p, q):
    n = p + q
    r2 = np.sqrt(2.0)
    kb, kl, pb, pl = [], [], [], []
    for lo, hi in ((0, p), (p, n)):
        for j in range(lo, hi):
            for k in range(j + 1, hi):
                kb.append((_e(n, j, k) - _e(n, k, j)) / r2)
                kl.append(f"k:re({j + 1},{k + 1})")
                kb.append(1j * (_e(n, j, k) + _e(n, k, j)) / r2)
                kl.append(f"k:im({j + 1},{k + 1})")
    for t, d in enumerate(_traceless_diagonals(n)):
        kb.append(1j * np.diag(d).astype(complex))
        kl.append(f"k:diag{t + 1}")
    for j in range(p):
        for k in range(q):
            a, b = j, p + k
            pb.append((_e(n, a, b) + _e(n, b, a)) / r2)
            pl.append(f"p:re({a + 1},{b + 1})")
            pb.append(1j * (_e(n, a, b) - _e(n, b, a)) / r2)
            pl.append(f"p:im({a + 1},{b + 1})")
    a_std = [_e(n, i, p + i) + _e(n, p + i, i) for i in range(p)]
    return kb, kl, pb, pl, a_std


def _block(a, b, c, d):
    return np.block([[a, b], [c, d]]).astype(complex)


def _sp_basis(n):
    z = np.zeros((n, n))
    kb, kl, pb, pl = [], [], [], []

    def sym(j, k):
        s = _e(n, j, k, float) + _e(n, k, j, float)
        return s if j != k else s / 2.0

    for j in range(n):
        for k in range(j + 1, n):
            a = _e(n, j, k, float) - _e(n, k, j, float)
            kb.append(_block(a, z, z, a) / 2.0)
            kl.append(f"k:A({j + 1},{k + 1})")
    for j in range(n):
        for k in range(j, n):
            s = sym(j, k)
            nrm = 2.0 if j != k else np.sqrt(2.0)
            kb.append(_block(z, s, -s, z) / nrm)
            kl.append(f"k:B({j + 1},{k + 1})")
    for j in range(n):
        for k in range(j, n):
            s = sym(j, k)
            nrm = 2.0 if j != k else np.sqrt(2.0)
            pb.append(_block(s, z, z, -s) / nrm)
            pl.append(f"p:A({j + 1},{k + 1})")
            pb.append(_block(z, s, s, z) / nrm)
            pl.append(f"p:B({j + 1},{k + 1})")
    a_std = [_block(_e(n, i, i, float), z, z, -_e(n, i, i, float)) for i in range(n)]
    return kb, kl, pb, pl, a_std


def _sym_sqrt(g, inverse=False):
    w, v = np.linalg.eigh(g)
    if np.min(w) <= 0:
        raise InvalidSpec("inner product on the constructed basis is not positive definite")
    s = w ** (-0.5 if inverse else 0.5)
    return (v * s) @ v.T


@dataclass(eq=False)
class ModelData:
    spec: SpaceSpec
    dim_g: int
    dim_k: int
    dim_p: int
    labels: list
    basis: np.ndarray        # (dim_g, N, N) complex matrices
    struct: np.ndarray       # struct[i, j, k] = coefficient of e_k in [e_i, e_j]
    theta: np.ndarray        # +1 on k, -1 on p
    killing: np.ndarray
    inner: np.ndarray
    a_std: np.ndarray        # (r, dim_g) model-standard generators of a
    coord_map: np.ndarray = field(repr=False)   # (dim_g, N*N) complex
    ad_basis: np.ndarray = field(repr=False)
    key: str = ""
    p_tag: str = "p"

    # ---- coordinates -------------------------------------------------
    @property
    def k_slice(self):
        return slice(0, self.dim_k)

    @property
    def p_slice(self):
        return slice(self.dim_k, self.dim_g)

    def vec(self, coeffs, home=None):
        c = np.asarray(coeffs, dtype=float)
        if c.shape == (self.dim_p,) and self.dim_p != self.dim_g:
            full = np.zeros(self.dim_g)
            full[self.dim_k:] = c
            return AlgVec(full, home or self.p_tag, self.key)
        if c.shape != (self.dim_g,):
            raise ModelMismatch(f"vector of shape {c.shape} does not fit dim_g = {self.dim_g}")
        return AlgVec(c, home or self.home_of(c), self.key)

    def coords(self, X):
        if isinstance(X, AlgVec) and X.model and X.model != self.key:
            raise ModelMismatch(f"vector belongs to {X.model}, model is {self.key}")
        c = np.asarray(X, dtype=float)
        if c.shape == (self.dim_p,) and self.dim_p != self.dim_g:
            full = np.zeros(self.dim_g)
            full[self.dim_k:] = c
            return full
        if c.shape != (self.dim_g,):
            raise ModelMismatch(f"vector of shape {c.shape} does not fit dim_g = {self.dim_g}")
        return c

    def pc(self, X):
        """p-coordinates (length dim_p) of a p-element."""
        return self.coords(X)[self.dim_k:]

    def home_of(self, c, tol=DEFAULT.structural):
        c = np.asarray(c, dtype=float)
        scale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
        k_zero = np.all(np.abs(c[: self.dim_k]) <= tol * scale)
        p_zero = np.all(np.abs(c[self.dim_k:]) <= tol * scale)
        if p_zero and not k_zero:
            return "k"
        if k_zero and not p_zero:
            return self.p_tag
        return "g" if not (k_zero and p_zero) else self.p_tag

    def to_matrix(self, X):
        return np.tensordot(self.coords(X), self.basis, axes=1)

    def from_matrix(self, M):
        return self.vec(np.real(self.coord_map.conj() @ np.asarray(M, dtype=complex).ravel()))

    # ---- complex coordinate of p ----------------------------------------
    def p_to_complex(self, X):
        M = self.to_matrix(X)
        if self.spec.is_su:
            p = self.spec.params[0]
            return M[:p, p:]
        n = self.spec.params[0]
        return M[:n, :n].real + 1j * M[:n, n:].real

    def complex_to_p(self, Z):
        Z = np.asarray(Z, dtype=complex)
        if self.spec.is_su:
            p, q = self.spec.params
            M = np.zeros((p + q, p + q), dtype=complex)
            M[:p, p:] = Z
            M[p:, :p] = Z.conj().T
        else:
            A, B = Z.real, Z.imag
            M = np.block([[A, B], [B, -A]]).astype(complex)
        v = self.from_matrix(M)
        return self.vec(v.coeffs, self.p_tag)

    # ---- random elements (explicit generator) ----------------------------
    def random_k(self, rng, scale=1.0):
        c = np.zeros(self.dim_g)
        c[: self.dim_k] = rng.standard_normal(self.dim_k) * scale
        return AlgVec(c, "k", self.key)

    def random_p(self, rng, scale=1.0):
        c = np.zeros(self.dim_g)
        c[self.dim_k:] = rng.standard_normal(self.dim_p) * scale
        return AlgVec(c, self.p_tag, self.key)


def _structure(basis_mats, coord_map_fn):
    d = len(basis_mats)
    c = np.zeros((d, d, d))
    for i in range(d):
        for j in range(i + 1, d):
            br = basis_mats[i] @ basis_mats[j] - basis_mats[j] @ basis_mats[i]
            c[i, j] = coord_map_fn(br)
            c[j, i] = -c[i, j]
    return c


def _killing_from(struct):
    ad = np.transpose(struct, (0, 2, 1))   # ad[i][k, j] = struct[i, j, k]
    return np.einsum("ikj,ljk->il", ad, ad), ad


def build_model(spec):
    """Build the matrix model of g for a SpaceSpec (or a string like 'su:2,2')."""
    if not isinstance(spec, SpaceSpec):
        spec = SpaceSpec.parse(spec)
    if spec.is_su:
        kb, kl, pb, pl, a_std = _su_pq_basis(*spec.params)
    else:
        kb, kl, pb, pl, a_std = _sp_basis(spec.params[0])
    mats = np.array(kb + pb, dtype=complex)
    labels = kl + pl
    dk, dp = len(kb), len(pb)
    d = dk + dp
    theta = np.concatenate([np.ones(dk), -np.ones(dp)])

    # first pass: Frobenius-orthonormal basis
    flat = mats.reshape(d, -1)

    def frob_coords(M):
        return np.real(flat.conj() @ M.ravel())

    st0 = _structure(mats, frob_coords)
    kil0, _ = _killing_from(st0)
    inner0 = -kil0 * theta[None, :]
    inner0 = 0.5 * (inner0 + inner0.T)
    # k and p are inner-orthogonal; rescale each block to an orthonormal basis
    S = np.zeros((d, d))
    S[:dk, :dk] = _sym_sqrt(inner0[:dk, :dk], inverse=True)
    S[dk:, dk:] = _sym_sqrt(inner0[dk:, dk:], inverse=True)
    Sinv = np.linalg.inv(S)
    new = np.tensordot(S.T, mats, axes=1)
    coord_map = Sinv.astype(complex) @ flat.conj()
    coord_map = coord_map.conj()     # from_matrix uses coord_map.conj() @ vec(M)

    def coords(M):
        return np.real(coord_map.conj() @ M.ravel())

    struct = _structure(new, coords)
    killing, ad = _killing_from(struct)
    inner = -killing * theta[None, :]
    killing = 0.5 * (killing + killing.T)
    inner = 0.5 * (inner + inner.T)
    a_rows = np.array([coords(H) for H in a_std])
    return ModelData(spec=spec, dim_g=d, dim_k=dk, dim_p=dp, labels=labels, basis=new,
                     struct=struct, theta=theta, killing=killing, inner=inner, a_std=a_rows,
                     coord_map=coord_map, ad_basis=ad, key=spec.key)


# ---- operations ---------------------------------------------------------

def _tag(m, hx, hy):
    ps = ("p", "p*")
    if hx == "k" and hy == "k":
        return "k"
    if (hx == "k" and hy in ps) or (hx in ps and hy == "k"):
        return m.p_tag
    if hx in ps and hy in ps:
        return "k"
    return "g"


def bracket(m, X, Y):
    x, y = m.coords(X), m.coords(Y)
    z = np.einsum("i,j,ijk->k", x, y, m.struct)
    hx = X.home if isinstance(X, AlgVec) else m.home_of(x)
    hy = Y.home if isinstance(Y, AlgVec) else m.home_of(y)
    return AlgVec(z, _tag(m, hx, hy), m.key)


def killing(m, X, Y):
    return float(m.coords(X) @ m.killing @ m.coords(Y))


def inner(m, X, Y):
    return float(m.coords(X) @ m.inner @ m.coords(Y))


def norm(m, X):
    return float(np.sqrt(max(inner(m, X, X), 0.0)))


def ad_operator(m, X):
    """Matrix O with O @ coords(Y) = coords([X, Y])."""
    return np.tensordot(m.coords(X), m.ad_basis, axes=1)


def ad_p(m, X):
    """ad(X) restricted to p -> p (useful for X in k) or k-block pieces."""
    return ad_operator(m, X)[m.dim_k:, m.dim_k:]


def adjoint_action(m, Z, X, t=1.0):
    """Ad(exp(tZ)) X for Z in k, via the matrix exponential of ad(Z)."""
    E = expm(t * ad_operator(m, Z))
    x = m.coords(X)
    h = X.home if isinstance(X, AlgVec) else m.home_of(x)
    return AlgVec(E @ x, h, m.key)


def adjoint_matrix(m, Z, t=1.0):
    return expm(t * ad_operator(m, Z))


# ---- structural residuals -------------------------------------------------

def jacobi_residual(m):
    c = m.struct
    t = np.einsum("ijm,mkl->ijkl", c, c)
    cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
    return float(np.max(np.abs(cyc)))


def theta_residual(m):
    th = m.theta
    lhs = m.struct * th[None, None, :]
    rhs = m.struct * th[:, None, None] * th[None, :, None]
    return float(np.max(np.abs(lhs - rhs)))


def grading_residual(m):
    """Size of the components violating [k,k] in k, [k,p] in p, [p,p] in k."""
    k, p = m.k_slice, m.p_slice
    c = m.struct
    return float(max(np.max(np.abs(c[k, k, p]), initial=0.0),
                     np.max(np.abs(c[k, p, k]), initial=0.0),
                     np.max(np.abs(c[p, p, p]), initial=0.0)))


def inner_min_eigenvalue(m):
    return float(np.min(np.linalg.eigvalsh(m.inner)))


def ad_selfadjoint_residual(m, X):
    """For X in p, ad(X) is symmetric in the inner metric."""
    O = ad_operator(m, X)
    G = m.inner
    return float(np.max(np.abs(G @ O - (G @ O).T)))
