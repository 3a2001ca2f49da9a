"""
Complex structure J0 = ad(zeta)|p, symplectic form, the Z_i basis and the
polydisk su(1,1) triples.

Orientation of zeta: the centre of k only fixes zeta up to sign, and every
quantity built from zeta alone (including omega0(H~, J0 H~)) is invariant
under the flip.  We pin the sign on the matrix model so that J0 acts on the
complex coordinate of p (off-diagonal block for su(p,q), A + iB for
sp(n,R)) as multiplication by -i.  For su(1,1) this gives exactly
zeta = (1/2) diag(-i, i).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, null_space

from .algebra import AlgVec, ad_operator, bracket
from .errors import BracketRelationFailure, CenterDimensionError, DecompositionFailure
from .tolerances import DEFAULT


@dataclass(eq=False)
class KahlerData:
    zeta: AlgVec
    J0: np.ndarray          # (dim_p, dim_p) acting on p-coordinates
    omega0: np.ndarray      # omega0(u, w) = u @ omega0 @ w = <J0 u, w>
    Zp: np.ndarray          # (r, dim_g) Z_i^p
    Zk: np.ndarray          # (r, dim_g) Z_i^k
    Z0: np.ndarray          # k0-component zeta + sum Z_i^k

    @property
    def Z_list(self):
        return [(self.Zk[i], self.Zp[i]) for i in range(len(self.Zp))]


def central_element(m, tol=DEFAULT):
    """Generator of the centre of k, normalised so ad(zeta)^2 = -1 on p."""
    k = m.k_slice
    rows = []
    for j in range(m.dim_k):
        # [Z, e_j] = -ad(e_j) Z, restricted to Z in k
        rows.append(m.ad_basis[j][:, k])
    Msys = np.vstack(rows)
    ns = null_space(Msys, rcond=1e-10)
    if ns.shape[1] != 1:
        raise CenterDimensionError(f"centre of k has dimension {ns.shape[1]}")
    z = np.zeros(m.dim_g)
    z[k] = ns[:, 0]
    Jp = ad_operator(m, z)[m.p_slice, m.p_slice]
    ev = np.linalg.eigvalsh(-(Jp @ Jp))
    if np.max(ev) - np.min(ev) > 1e-8 * np.max(ev):
        raise CenterDimensionError("ad(centre)^2 is not scalar on p")
    z = z / np.sqrt(np.mean(ev))
    # orientation: J0 = multiplication by -i on the complex coordinate of p
    probe = m.complex_to_p(np.eye(*m.p_to_complex(m.vec(m.a_std[0])).shape))
    Jprobe = bracket(m, AlgVec(z, "k", m.key), probe)
    target = m.complex_to_p(-1j * m.p_to_complex(probe))
    if np.dot(Jprobe.coeffs, target.coeffs) < 0:
        z = -z
    return AlgVec(z, "k", m.key)


def complex_structure(m, zeta):
    J0 = ad_operator(m, zeta)[m.p_slice, m.p_slice]
    omega0 = J0.T.copy()   # omega0(u, w) = <J0 u, w> = u . J0^T w
    return J0, omega0


def z_basis(m, datum, J0, zeta=None, tol=DEFAULT):
    """Z_i^p = J0 H_i / C and Z_i^k = [H_i, Z_i^p] / gamma_i(H_i)."""
    C = datum.C
    Zp, Zk = [], []
    for H in datum.H_vectors:
        zp = np.zeros(m.dim_g)
        zp[m.p_slice] = J0 @ H[m.p_slice] / C
        gH = float(H @ H)                      # gamma_i(H_i) = |H_i|^2
        zk = bracket(m, AlgVec(H, "p", m.key), AlgVec(zp, "p", m.key)).coeffs / gH
        Zp.append(zp)
        Zk.append(zk)
    Zp, Zk = np.array(Zp), np.array(Zk)
    Z0 = None
    if zeta is not None:
        Z0 = np.asarray(zeta, dtype=float) + Zk.sum(axis=0)
        # Z0 must centralise a
        for H in datum.H_vectors:
            res = np.linalg.norm(ad_operator(m, Z0) @ H)
            if res > 1e-8:
                raise DecompositionFailure(f"zeta + sum Z_i^k does not centralise a ({res:.2e})")
    return Zp, Zk, Z0


def kahler_data(m, datum):
    zeta = central_element(m)
    J0, omega0 = complex_structure(m, zeta)
    Zp, Zk, Z0 = z_basis(m, datum, J0, zeta)
    return KahlerData(zeta=zeta, J0=J0, omega0=omega0, Zp=Zp, Zk=Zk, Z0=Z0)


def J_apply(m, K, X):
    """J0 on a full-length p-vector."""
    x = m.coords(X)
    out = np.zeros(m.dim_g)
    out[m.p_slice] = K.J0 @ x[m.p_slice]
    return AlgVec(out, m.p_tag, m.key)


def omega(K, m, u, w):
    return float(m.pc(u) @ K.omega0 @ m.pc(w))


# ---- residual checks -----------------------------------------------------------

def centrality_residual(m, zeta):
    A = ad_operator(m, zeta)
    return float(np.max(np.abs(A[:, m.k_slice])))


def complex_structure_residuals(K):
    J = K.J0
    n = J.shape[0]
    return {
        "J0^2=-1": float(np.max(np.abs(J @ J + np.eye(n)))),
        "J0 orthogonal": float(np.max(np.abs(J.T @ J - np.eye(n)))),
        "omega0 antisymmetric": float(np.max(np.abs(K.omega0 + K.omega0.T))),
        "omega0 nondegenerate": float(1.0 - np.min(np.abs(np.linalg.eigvals(K.omega0)))),
    }


def z_norm_residual(datum, K):
    C = datum.C
    nk = np.einsum("ij,ij->i", K.Zk, K.Zk)
    npp = np.einsum("ij,ij->i", K.Zp, K.Zp)
    return float(max(np.max(np.abs(nk - 1 / C)), np.max(np.abs(npp - 1 / C))))


def z_bracket_residuals(m, datum, K):
    """[Z_i^k, Z_i^p] = H_i / C, [H~_i, Z_i^k] = 2 Z_i^p, [H~_i, Z_i^p] = 2 Z_i^k, J0 H~_i = 2 Z_i^p,
    and [Z_i^k, Z_j^p] = 0 for i != j."""
    C, r = datum.C, datum.rank
    out = {"[Zk,Zp]=H/C": 0.0, "[H~,Zk]=2Zp": 0.0, "[H~,Zp]=2Zk": 0.0, "J0 H~=2Zp": 0.0,
           "[Zk_i,Zp_j]=0": 0.0}

    def br(a, b):
        return bracket(m, AlgVec(a, "g", m.key), AlgVec(b, "g", m.key)).coeffs

    for i in range(r):
        Ht = datum.H_tilde[i]
        out["[Zk,Zp]=H/C"] = max(out["[Zk,Zp]=H/C"],
                                 np.max(np.abs(br(K.Zk[i], K.Zp[i]) - datum.H_vectors[i] / C)))
        out["[H~,Zk]=2Zp"] = max(out["[H~,Zk]=2Zp"], np.max(np.abs(br(Ht, K.Zk[i]) - 2 * K.Zp[i])))
        out["[H~,Zp]=2Zk"] = max(out["[H~,Zp]=2Zk"], np.max(np.abs(br(Ht, K.Zp[i]) - 2 * K.Zk[i])))
        jh = K.J0 @ Ht[m.p_slice]
        out["J0 H~=2Zp"] = max(out["J0 H~=2Zp"], np.max(np.abs(jh - 2 * K.Zp[i][m.p_slice])))
        for j in range(r):
            if i != j:
                out["[Zk_i,Zp_j]=0"] = max(out["[Zk_i,Zp_j]=0"], np.max(np.abs(br(K.Zk[i], K.Zp[j]))))
    return {k: float(v) for k, v in out.items()}


def verify_J_mapping(m, datum, K):
    """Residuals of J0 p_gamma_i = a_i, J0 p_lambda = p_lambda_bar, J0 p_eps = p_eps.

    For each root the residual is the part of J0 p_alpha outside the target
    block, plus the failure of the projection onto the target to be isometric.
    """
    ps = m.p_slice
    rep = {}
    for a in datum.positive:
        src = a.p_basis[:, ps]
        if a.kind == "gamma":
            i = a.indices[0]
            h = datum.H_tilde[i][ps]
            tgt = (h / np.linalg.norm(h))[None, :]
            name = f"J0 p_{a.label} = a_{i + 1}"
        elif a.kind in ("lambda", "lambda_bar"):
            b = datum.bar(a)
            tgt = b.p_basis[:, ps]
            name = f"J0 p_{a.label} = p_{b.label}"
        else:
            tgt = src
            name = f"J0 p_{a.label} = p_{a.label}"
        img = src @ K.J0.T                      # rows J0 x
        proj = img @ tgt.T                      # coefficients on the target basis
        off = img - proj @ tgt
        iso = proj @ proj.T - np.eye(len(src))
        rep[name] = float(max(np.max(np.abs(off)), np.max(np.abs(iso))))
    return rep


# ---- polydisk -----------------------------------------------------------------

SIGMA_H = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_J = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_B = 2 * np.diag([1j, -1j])
ZETA_HAT = 0.5 * np.diag([-1j, 1j])


@dataclass(eq=False)
class PolydiskData:
    triples: list            # [(H~_i, J0 H~_i, [H~_i, J0 H~_i])] as dim_g vectors
    lines: list              # a_i^C = span{H~_i, J0 H~_i} (2, dim_g)
    f_images: tuple = (SIGMA_H, SIGMA_J, SIGMA_B)
    residuals: dict = field(default_factory=dict)

    def f(self, i, coeffs):
        """su(1,1)-coordinate map on u_i: a H~ + b J0H~ + c [H~, J0H~] -> matrix."""
        a, b, c = coeffs
        return a * SIGMA_H + b * SIGMA_J + c * SIGMA_B

    def u_coords(self, i, X):
        T = np.array(self.triples[i])
        return np.linalg.lstsq(T.T, np.asarray(X, dtype=float), rcond=None)[0]


def su11_inner(C, X, Y):
    return float((2.0 / C) * np.real(np.trace(X @ Y.conj().T)))


def polydisk(m, datum, K, tol=DEFAULT, strict=True):
    r, C = datum.rank, datum.C
    trip, lines = [], []
    res = {"[[H,JH],JH]=4H": 0.0, "[[H,JH],H]=-4JH": 0.0, "[u_i,u_j]=0": 0.0,
           "f_i homomorphism": 0.0, "f_i isometry": 0.0}

    def br(a, b):
        return bracket(m, AlgVec(a, "g", m.key), AlgVec(b, "g", m.key)).coeffs

    for i in range(r):
        Ht = datum.H_tilde[i]
        JH = J_apply(m, K, Ht).coeffs
        B = br(Ht, JH)
        trip.append((Ht, JH, B))
        lines.append(np.array([Ht, JH]))
        res["[[H,JH],JH]=4H"] = max(res["[[H,JH],JH]=4H"], np.max(np.abs(br(B, JH) - 4 * Ht)))
        res["[[H,JH],H]=-4JH"] = max(res["[[H,JH],H]=-4JH"], np.max(np.abs(br(B, Ht) + 4 * JH)))
        # bracket table on u_i against su(1,1) under f
        imgs = [SIGMA_H, SIGMA_J, SIGMA_B]
        T = np.array(trip[-1])
        for a in range(3):
            for b in range(3):
                lhs = br(T[a], T[b])
                cf = np.linalg.lstsq(T.T, lhs, rcond=None)[0]
                fit = np.max(np.abs(T.T @ cf - lhs))
                tgt = imgs[a] @ imgs[b] - imgs[b] @ imgs[a]
                img = sum(c * M for c, M in zip(cf, imgs))
                res["f_i homomorphism"] = max(res["f_i homomorphism"], fit, np.max(np.abs(img - tgt)))
        for a in range(3):
            for b in range(3):
                lhs = float(T[a] @ m.inner @ T[b])
                res["f_i isometry"] = max(res["f_i isometry"], abs(lhs - su11_inner(C, imgs[a], imgs[b])))
    for i in range(r):
        for j in range(r):
            if i != j:
                for x in trip[i]:
                    for y in trip[j]:
                        res["[u_i,u_j]=0"] = max(res["[u_i,u_j]=0"], np.max(np.abs(br(x, y))))
    res = {k: float(v) for k, v in res.items()}
    worst = max(res["[[H,JH],JH]=4H"], res["[[H,JH],H]=-4JH"], res["[u_i,u_j]=0"])
    if strict and worst > tol.orthogonality:
        raise BracketRelationFailure(f"polydisk bracket relations fail: {res}")
    return PolydiskData(triples=trip, lines=lines, residuals=res)


def jp_restriction_residual(m, datum, K):
    """J0 on a_i^C equals ad(-Z_i^k) there."""
    worst = 0.0
    for i in range(datum.rank):
        A = -ad_operator(m, K.Zk[i])
        for v in (datum.H_tilde[i], J_apply(m, K, datum.H_tilde[i]).coeffs):
            worst = max(worst, np.max(np.abs(A @ v - J_apply(m, K, v).coeffs)))
    return float(worst)


def torus_action_residual(m, datum, K, angles=(np.pi / 7, np.pi / 3)):
    """Ad(exp(-t Z_i^k)) rotates a_i^C by e^{it} (J0 as i) and fixes a_j^C, j != i."""
    worst = 0.0
    for t in angles:
        for i in range(datum.rank):
            E = expm(-t * ad_operator(m, K.Zk[i]))
            for j in range(datum.rank):
                Ht = datum.H_tilde[j]
                JH = J_apply(m, K, Ht).coeffs
                if i == j:
                    e1 = np.cos(t) * Ht + np.sin(t) * JH
                    e2 = -np.sin(t) * Ht + np.cos(t) * JH
                else:
                    e1, e2 = Ht, JH
                worst = max(worst, np.max(np.abs(E @ Ht - e1)), np.max(np.abs(E @ JH - e2)))
    return float(worst)
