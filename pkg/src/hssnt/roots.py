"""
Restricted roots of (g, a) for the model-standard maximal abelian a in p.

Roots are found by a two-level simultaneous diagonalisation: a generic
positive combination of the commuting operators ad(H_k)^2 separates the
pairs {+alpha, -alpha} (up to accidental coincidences such as
e1+e2 / e1-e2), and ad(H) for a generic H in a then splits each cluster by
sign.  Every final cluster is certified to be a joint eigenspace of all
ad(H_k).  The e_i frame is pinned by the long roots Gamma = {2 e_i}.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgVec, ad_operator, bracket, inner
from .errors import ClusteringAmbiguity, DegenerateAbelian, NotHermitianType, NotSignedPermutation
from .tolerances import DEFAULT

_GOLD = (1.0 + np.sqrt(5.0)) / 2.0


def _weights(r, shift=0.0):
    return np.array([1.0 / (k + _GOLD + shift) for k in range(r)])


def _cluster(values, rel):
    """Split sorted values into groups whose consecutive gaps exceed rel * scale."""
    order = np.argsort(values)
    v = values[order]
    scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
    groups, cur = [], [order[0]]
    for a, b, idx in zip(v[:-1], v[1:], order[1:]):
        if b - a > rel * scale:
            groups.append(cur)
            cur = []
        cur.append(idx)
    groups.append(cur)
    return groups


def _mgs(rows, tol=1e-10):
    """Modified Gram-Schmidt on rows (Euclidean = inner metric in our basis)."""
    out = []
    for v in rows:
        w = np.array(v, dtype=float)
        for u in out:
            w = w - (u @ w) * u
        n = np.linalg.norm(w)
        if n > tol:
            out.append(w / n)
    return np.array(out) if out else np.zeros((0, len(rows[0]) if len(rows) else 0))


def _label(coeffs):
    parts = []
    for i, c in enumerate(coeffs):
        k = int(round(c))
        if k == 0:
            continue
        mag = "" if abs(k) == 1 else str(abs(k))
        parts.append(("+" if k > 0 else "-") + f"{mag}e{i + 1}")
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


@dataclass(eq=False)
class Root:
    label: str
    kind: str               # gamma | lambda | lambda_bar | eps, or negative
    coeffs: np.ndarray      # alpha(H~_i)
    positive: bool
    mult: int
    X: np.ndarray           # orthonormal basis of g_alpha (rows, dim_g coords)
    Xk: np.ndarray          # k-parts, |Xk|^2 = 1/2
    Xp: np.ndarray          # p-parts, |Xp|^2 = 1/2
    p_basis: np.ndarray     # orthonormal basis of p_alpha
    k_basis: np.ndarray     # orthonormal basis of k_alpha
    H: np.ndarray           # root vector H_alpha
    indices: tuple = ()

    def __call__(self, x):
        """Evaluate on a-coordinates in the H~ frame."""
        return float(np.dot(self.coeffs, x))

    def __repr__(self):
        return f"Root({self.label}, m={self.mult})"


@dataclass(eq=False)
class RootDatum:
    model: object
    a_basis: np.ndarray     # orthonormal basis of a (rows)
    roots: list
    rank: int
    sys_type: str           # 'C' or 'BC'
    Gamma: list
    Lambda: list
    Lambda_bar: list
    E: list
    H_vectors: np.ndarray
    H_tilde: np.ndarray
    C: float
    k0_basis: np.ndarray
    clusters: list = field(repr=False, default_factory=list)

    @property
    def type_label(self):
        return f"{self.sys_type}{self.rank}"

    @property
    def positive(self):
        return [a for a in self.roots if a.positive]

    @property
    def multiplicities(self):
        return {a.label: a.mult for a in self.positive}

    def root(self, label):
        if isinstance(label, Root):
            return label
        key = str(label).replace(" ", "")
        for a in self.roots:
            if a.label == key:
                return a
        raise KeyError(f"no root labelled {label!r}; have {[a.label for a in self.roots]}")

    def bar(self, alpha):
        """lambda = e_i + e_j <-> e_i - e_j; eps and gamma map to themselves."""
        a = self.root(alpha)
        if a.kind == "lambda":
            i, j = a.indices
            return self.root(f"e{i + 1}-e{j + 1}")
        if a.kind == "lambda_bar":
            i, j = a.indices
            return self.root(f"e{i + 1}+e{j + 1}")
        return a

    # coordinates in the H~ frame
    def a_coords(self, H):
        h = np.asarray(H, dtype=float)
        return (self.H_tilde @ h) * self.C / 4.0

    def from_a(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.rank,):
            from .errors import RankMismatch
            raise RankMismatch(f"expected {self.rank} coefficients, got {x.shape}")
        return AlgVec(x @ self.H_tilde, self.model.p_tag, self.model.key)

    def root_value(self, alpha, H):
        """alpha(H) = <H_alpha, H> for H in a."""
        return float(self.root(alpha).H @ np.asarray(H, dtype=float))


def _classify_coeffs(c, tol=1e-6):
    """Return (kind, indices, sign) for a coefficient vector or None."""
    k = np.round(c).astype(int)
    if np.max(np.abs(c - k)) > tol:
        return None
    nz = np.flatnonzero(k)
    if len(nz) == 1 and abs(k[nz[0]]) in (1, 2):
        i = nz[0]
        kind = "gamma" if abs(k[i]) == 2 else "eps"
        return kind, (i,), int(np.sign(k[i]))
    if len(nz) == 2 and np.all(np.abs(k[nz]) == 1):
        i, j = nz
        if k[i] == k[j]:
            return "lambda", (i, j), int(k[i])
        return "lambda_bar", (i, j), int(k[i])
    return None


def restricted_roots(m, tol=DEFAULT):
    """Restricted root decomposition of the model with respect to its standard a."""
    A = m.a_std
    r = len(A)
    a_basis = _mgs(A)
    if len(a_basis) != r:
        raise DegenerateAbelian("standard generators of a are linearly dependent")
    ops = [ad_operator(m, H) for H in A]
    for i in range(r):
        for j in range(i + 1, r):
            if np.max(np.abs(ops[i] @ ops[j] - ops[j] @ ops[i])) > 1e-9:
                raise DegenerateAbelian("supplied a is not abelian")

    w2 = _weights(r, shift=0.37)
    S = sum(w * O @ O for w, O in zip(w2, ops))
    S = 0.5 * (S + S.T)
    ev, V = np.linalg.eigh(S)
    wg = _weights(r)
    Hgen = sum(w * O for w, O in zip(wg, ops))
    clusters = []
    for grp in _cluster(ev, tol.root_cluster):
        P = V[:, grp]
        M = P.T @ Hgen @ P
        e2, U = np.linalg.eigh(0.5 * (M + M.T))
        for sub in _cluster(e2, tol.root_cluster):
            clusters.append(P @ U[:, sub])

    # joint-eigenspace certificate and root values on the standard generators
    scale = max(1.0, max(np.max(np.abs(O)) for O in ops))
    found = []
    for Q in clusters:
        vals = []
        for O in ops:
            blk = Q.T @ O @ Q
            val = float(np.trace(blk) / Q.shape[1])
            res = np.max(np.abs(O @ Q - val * Q))
            if res > 1e-7 * scale:
                raise ClusteringAmbiguity(f"cluster of dim {Q.shape[1]} is not a joint eigenspace "
                                          f"(residual {res:.2e})")
            vals.append(val)
        found.append((np.array(vals), Q))

    zero = [Q for vals, Q in found if np.max(np.abs(vals)) <= 1e-8 * scale]
    if len(zero) != 1:
        raise ClusteringAmbiguity("zero weight space not isolated")
    g0 = zero[0]
    p_part = g0[m.dim_k:, :]
    dim_a_cent = int(np.sum(np.linalg.svd(p_part, compute_uv=False) > 1e-8))
    if dim_a_cent > r:
        raise DegenerateAbelian(f"centralizer of a in p has dim {dim_a_cent} > {r}")
    k0 = _mgs(g0[: m.dim_k, :].T)
    k0_full = np.zeros((len(k0), m.dim_g))
    if len(k0):
        k0_full[:, : m.dim_k] = k0

    # feq3: H_alpha = [X, X_-alpha] / B(X, X_-alpha) with X_-alpha = theta X
    def root_vector(Xrow):
        x = AlgVec(Xrow, "g", m.key)
        tx = AlgVec(m.theta * Xrow, "g", m.key)
        num = bracket(m, x, tx).coeffs
        den = float(Xrow @ m.killing @ (m.theta * Xrow))
        return num / den

    raw = []
    gen_vals = np.array([wg @ vals for vals, _ in found])
    for (vals, Q), gv in zip(found, gen_vals):
        if np.max(np.abs(vals)) <= 1e-8 * scale:
            continue
        X = Q.T
        Hal = root_vector(X[0])
        raw.append(dict(vals=vals, X=X, H=Hal, gen=gv, len2=float(Hal @ Hal)))
    pos = [d for d in raw if d["gen"] > 0]
    longest = max(d["len2"] for d in pos)
    Gam = sorted([d for d in pos if abs(d["len2"] - longest) <= 1e-8 * longest],
                 key=lambda d: -d["gen"])
    if len(Gam) != r:
        raise NotHermitianType(f"found {len(Gam)} long positive roots, rank is {r}")
    Hs = np.array([d["H"] for d in Gam])
    C = float(np.mean(np.einsum("ij,ij->i", Hs, Hs)))
    Ht = 2.0 * Hs / C
    # express H~_i in the standard generators to evaluate roots linearly
    T = np.linalg.lstsq(A.T, Ht.T, rcond=None)[0].T

    roots = []
    for d in raw:
        coeffs = T @ d["vals"]
        info = _classify_coeffs(coeffs)
        if info is None:
            raise NotHermitianType(f"root with e-frame coefficients {np.round(coeffs, 6)} "
                                   "matches neither C nor BC")
        kind, idx, sign = info
        X = d["X"]
        Xk = X.copy()
        Xk[:, m.dim_k:] = 0.0
        Xp = X.copy()
        Xp[:, : m.dim_k] = 0.0
        positive = d["gen"] > 0
        roots.append(Root(label=_label(coeffs), kind=kind if positive else "neg",
                          coeffs=np.round(coeffs).astype(float), positive=positive,
                          mult=X.shape[0], X=X, Xk=Xk, Xp=Xp, p_basis=_mgs(Xp), k_basis=_mgs(Xk),
                          H=d["H"], indices=tuple(int(i) for i in idx)))
    roots.sort(key=lambda a: (not a.positive, a.label))
    P = [a for a in roots if a.positive]
    datum = RootDatum(model=m, a_basis=a_basis, roots=roots, rank=r, sys_type="",
                      Gamma=sorted([a for a in P if a.kind == "gamma"], key=lambda a: a.indices),
                      Lambda=sorted([a for a in P if a.kind == "lambda"], key=lambda a: a.indices),
                      Lambda_bar=sorted([a for a in P if a.kind == "lambda_bar"], key=lambda a: a.indices),
                      E=sorted([a for a in P if a.kind == "eps"], key=lambda a: a.indices),
                      H_vectors=Hs, H_tilde=Ht, C=C, k0_basis=k0_full, clusters=clusters)
    datum.sys_type = classify_type(datum)
    return datum


def _template(r, bc):
    out = set()
    for i in range(r):
        for s in (1, -1):
            v = [0] * r
            v[i] = 2 * s
            out.add(tuple(v))
            if bc:
                v = [0] * r
                v[i] = s
                out.add(tuple(v))
        for j in range(i + 1, r):
            for si in (1, -1):
                for sj in (1, -1):
                    v = [0] * r
                    v[i], v[j] = si, sj
                    out.add(tuple(v))
    return out


def classify_type(datum):
    """'C' or 'BC' by exact match of the root set against the two templates."""
    r = datum.rank
    have = set()
    for a in datum.roots:
        k = np.round(a.coeffs).astype(int)
        if np.max(np.abs(a.coeffs - k)) > 1e-8:
            raise NotHermitianType(f"non-integral root {a.coeffs}")
        have.add(tuple(int(x) for x in k))
    if len(have) != len(datum.roots):
        raise NotHermitianType("duplicate roots")
    highest = [a for a in datum.roots if a.label == "2e1"]
    if not highest or highest[0].mult != 1:
        raise NotHermitianType("highest root 2e1 missing or not of multiplicity 1")
    if have == _template(r, bc=False):
        return "C"
    if have == _template(r, bc=True):
        return "BC"
    raise NotHermitianType("root set matches neither C_r nor BC_r")


def gamma_data(datum):
    """(H_i, H~_i, C) for the strongly orthogonal long roots."""
    return datum.H_vectors, datum.H_tilde, datum.C


def weyl_reflect(datum, alpha, H):
    a = datum.root(alpha)
    h = np.asarray(H, dtype=float)
    Ha = a.H
    out = h - 2.0 * (Ha @ h) / (Ha @ Ha) * Ha
    return AlgVec(out, datum.model.p_tag, datum.model.key)


def reflection_matrix(datum, alpha):
    """Matrix of rho_alpha in the H~ frame (columns = images of H~_j)."""
    cols = [datum.a_coords(weyl_reflect(datum, alpha, Ht).coeffs) for Ht in datum.H_tilde]
    return np.array(cols).T


def weyl_signed_permutation(datum, word, tol=DEFAULT.structural):
    """
    Signed permutation of the composite rho_{w[0]} o rho_{w[1]} o ... on {H~_i}.

    Returns (perm, signs) with rho(H~_j) = signs[j] * H~_{perm[j]} (0-based).
    """
    r = datum.rank
    W = np.eye(r)
    for a in word:
        W = W @ reflection_matrix(datum, a)
    perm, signs = [], []
    for j in range(r):
        col = W[:, j]
        i = int(np.argmax(np.abs(col)))
        ideal = np.zeros(r)
        ideal[i] = np.sign(col[i])
        res = np.max(np.abs(col - ideal))
        if res > max(tol, 1e-12) * 10 or abs(abs(col[i]) - 1.0) > 1e-10:
            raise NotSignedPermutation(f"column {j} = {col} (residual {res:.2e})")
        perm.append(i)
        signs.append(int(np.sign(col[i])))
    if sorted(perm) != list(range(r)):
        raise NotSignedPermutation(f"not a permutation: {perm}")
    return tuple(perm), tuple(signs)


# ---- structural residuals ----------------------------------------------------

def reconstruction_residual(datum):
    """Projector sum over all joint eigenspaces and orthogonal splitting of p."""
    m = datum.model
    Psum = sum(Q @ Q.T for Q in datum.clusters)
    r1 = float(np.max(np.abs(Psum - np.eye(m.dim_g))))
    rows = [datum.a_basis] + [a.p_basis for a in datum.positive]
    B = np.vstack(rows)[:, m.dim_k:]
    r2 = float(np.max(np.abs(B @ B.T - np.eye(B.shape[0]))))
    r3 = abs(B.shape[0] - m.dim_p)
    return max(r1, r2, float(r3))


def norm_balance_residual(datum):
    """dim k_alpha = dim p_alpha = m_alpha and |X^k| = |X^p|."""
    res = 0.0
    for a in datum.positive:
        res = max(res, abs(len(a.k_basis) - a.mult), abs(len(a.p_basis) - a.mult))
        nk = np.einsum("ij,ij->i", a.Xk, a.Xk)
        npp = np.einsum("ij,ij->i", a.Xp, a.Xp)
        res = max(res, float(np.max(np.abs(nk - npp))))
    return res


def bracket_grading_residual(datum, rng, samples=50):
    """[k_alpha, p_beta] must lie in p_{alpha+beta} + p_{alpha-beta} (a when alpha = +-beta)."""
    m = datum.model
    pos = datum.positive
    by_coeff = {tuple(np.round(a.coeffs).astype(int)): a for a in pos}
    worst = 0.0
    for _ in range(samples):
        a = pos[rng.integers(len(pos))]
        b = pos[rng.integers(len(pos))]
        X = rng.standard_normal(a.mult) @ a.k_basis
        Y = rng.standard_normal(b.mult) @ b.p_basis
        Z = bracket(m, AlgVec(X, "k", m.key), AlgVec(Y, "p", m.key)).coeffs
        allowed = []
        for c in (a.coeffs + b.coeffs, a.coeffs - b.coeffs):
            key = tuple(np.round(c).astype(int))
            neg = tuple(-x for x in key)
            if not any(key):
                allowed.append(datum.a_basis)
            elif key in by_coeff:
                allowed.append(by_coeff[key].p_basis)
            elif neg in by_coeff:
                allowed.append(by_coeff[neg].p_basis)
        if allowed:
            B = np.vstack(allowed)
            Z = Z - B.T @ (B @ Z)
        worst = max(worst, float(np.linalg.norm(Z)) / max(1.0, np.linalg.norm(X) * np.linalg.norm(Y)))
    return worst


def orth_residual(datum):
    """<H_i, H_j> = C delta_ij."""
    G = datum.H_vectors @ datum.model.inner @ datum.H_vectors.T
    return float(np.max(np.abs(G - datum.C * np.eye(datum.rank))))


def parse_word(text):
    return [w for w in re.split(r"[;\s]+", text.strip()) if w]
