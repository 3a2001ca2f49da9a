"""
Abelian subspaces of a, their canonical bases, and totally geodesic tests.

A subspace a' of a is written in H~ coordinates.  Its canonical basis is
V_m = H~_{i_m} + sum_{i not in I'} a_m^i H~_i, i.e. the reduced row echelon
form of any spanning set.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DependentInput
from .geomverify import VerifyReport
from .realize import builtin_odd, odd_calculus
from .tolerances import DEFAULT


@dataclass(eq=False)
class AbelianSubspace:
    vectors: np.ndarray     # input rows, H~ coordinates
    basis: np.ndarray       # canonical rows V_m
    pivots: tuple           # I' (0-based)

    @property
    def dim(self):
        return len(self.pivots)

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def free(self):
        return tuple(i for i in range(self.rank) if i not in self.pivots)

    def coefficients(self):
        """a_m^i for i outside I' (rows m, columns = free indices)."""
        return self.basis[:, list(self.free)]


def canonical_basis(vectors, tol=DEFAULT.coefficient):
    A = np.atleast_2d(np.asarray(vectors, dtype=float)).copy()
    n, r = A.shape
    if n == 0 or np.linalg.matrix_rank(A, tol=tol * max(1.0, np.max(np.abs(A)))) < n:
        raise DependentInput(f"{n} vectors span a space of lower dimension")
    row, pivots = 0, []
    for col in range(r):
        if row == n:
            break
        k = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[k, col]) <= tol:
            continue
        A[[row, k]] = A[[k, row]]
        A[row] /= A[row, col]
        for j in range(n):
            if j != row:
                A[j] -= A[j, col] * A[row]
        pivots.append(col)
        row += 1
    A[np.abs(A) < 1e-13] = 0.0
    return AbelianSubspace(np.atleast_2d(np.asarray(vectors, dtype=float)), A, tuple(pivots))


def has_clts(sub, tol=DEFAULT.coefficient):
    """Each free column has at most one nonzero and every coefficient is 0 or +-1."""
    a = sub.coefficients()
    nz = np.abs(a) > tol
    if np.any(nz.sum(axis=0) > 1):
        return False
    return bool(np.all(~nz | (np.abs(np.abs(a) - 1.0) <= tol)))


# ---- bracket checks in p ----------------------------------------------------------------

def _p_rows(sp, vectors):
    m = sp.model
    rows = []
    for v in vectors:
        c = np.asarray(v, dtype=float)
        if c.shape == (m.dim_p,):
            full = np.zeros(m.dim_g)
            full[m.p_slice] = c
            c = full
        rows.append(m.coords(c))
    return np.array(rows)


def lts_residual(sp, vectors):
    """max over orthonormal basis triples of |[[u, v], w]| off the span."""
    m = sp.model
    R = _p_rows(sp, vectors)
    U, s, _ = np.linalg.svd(R.T, full_matrices=False)
    Q = U[:, s > 1e-12 * max(1.0, s[0])].T
    st = m.struct
    B = np.einsum("ai,bj,ijk->abk", Q, Q, st)
    T = np.einsum("abi,cj,ijk->abck", B, Q, st)
    proj = T - np.einsum("abck,dk,dl->abcl", T, Q, Q)
    return float(np.max(np.abs(proj))) if proj.size else 0.0


def verify_lts(sp, vectors, tol=DEFAULT.lts):
    return lts_residual(sp, vectors) < tol


def complexified(sp, sub):
    """p-coordinates of a' + J0 a'."""
    m = sp.model
    rows = []
    for b in sub.basis:
        v = sp.from_a(b).coeffs[m.p_slice]
        rows += [v, sp.J0 @ v]
    return rows


def _pvec(sp, x):
    m = sp.model
    return sp.from_a(x).coeffs


def _Jfull(sp, X):
    m = sp.model
    out = np.zeros(m.dim_g)
    out[m.p_slice] = sp.J0 @ X[m.p_slice]
    return out


def abra_residual(sp, vectors):
    """Max violation of [[V_m, J V_m], J V_m] = J[[V_m, J V_m], V_m] = 4 V_m and zero otherwise."""
    m = sp.model
    st = m.struct

    def br(a, b):
        return np.einsum("i,j,ijk->k", a, b, st)

    V = [_pvec(sp, v) for v in np.atleast_2d(np.asarray(vectors, dtype=float))]
    JV = [_Jfull(sp, v) for v in V]
    worst = 0.0
    n = len(V)
    for a, b, c in itertools.product(range(n), repeat=3):
        inner_ = br(V[a], JV[b])
        t1 = br(inner_, JV[c])
        t2 = _Jfull(sp, br(inner_, V[c])) if a == b == c else br(inner_, V[c])
        target = 4 * V[a] if a == b == c else 0.0
        worst = max(worst, float(np.max(np.abs(t1 - target))), float(np.max(np.abs(t2 - target))))
    return worst


def abra_check(sp, vectors, tol=DEFAULT.identity):
    return abra_residual(sp, vectors) < tol


# ---- restriction theorem ---------------------------------------------------------------

def restriction_residual(sp, sub, eta, x):
    """|odd_calculus(sum x_m V_m) - sum eta(x_m) V_m| for one coefficient vector."""
    eta = builtin_odd(eta)
    m = sp.model
    x = np.asarray(x, dtype=float)
    X = m.vec(sp.from_a(x @ sub.basis).coeffs)
    lhs = odd_calculus(sp, X, eta).coeffs
    rhs = sp.from_a(eta(x) @ sub.basis).coeffs
    return float(np.max(np.abs(lhs - rhs)))


def restriction_check(sp, sub, eta, n_samples=20, seed=0, tol=DEFAULT.lts):
    eta = builtin_odd(eta)
    rng = np.random.default_rng(seed)
    amax = float(np.max(np.abs(sub.basis)))
    top = 1.5
    if np.isfinite(eta.radius):
        top = min(top, 0.9 * eta.radius / (sub.dim * amax))
    worst = 0.0
    for _ in range(n_samples):
        x = rng.uniform(0.1 * top, top, sub.dim) * rng.choice([-1.0, 1.0], sub.dim)
        worst = max(worst, restriction_residual(sp, sub, eta, x))
    rep = VerifyReport(eta.name, n_samples, seed, sp.model.key)
    rep.add("restriction", worst, tol)
    return rep


# ---- rank-2 enumeration --------------------------------------------------------------

GRID_VALUES = (-1.0, -0.5, 0.0, 0.5, 1.0)


def rank2_grid():
    """All nonzero single vectors and ordered independent pairs with grid coefficients."""
    singles = [np.array(v) for v in itertools.product(GRID_VALUES, repeat=2) if any(v)]
    cells = [[v] for v in singles]
    for u, w in itertools.product(singles, repeat=2):
        if abs(u[0] * w[1] - u[1] * w[0]) > 1e-12:
            cells.append([u, w])
    return cells


def clts_directions(cells=None):
    """Canonical dimension-1 bases with has_clts true, as a sorted tuple of coefficient tuples."""
    cells = rank2_grid() if cells is None else cells
    found = set()
    for c in cells:
        if len(c) == 1:
            sub = canonical_basis(c)
            if has_clts(sub):
                found.add(tuple(float(t) for t in sub.basis[0]))
    return tuple(sorted(found))
