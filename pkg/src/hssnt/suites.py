"""Named verification suites: each returns a list of (check name, max residual, tol)."""

import numpy as np
from scipy.linalg import expm

from . import dual as dual_mod
from . import geomverify as gv
from . import kahler as kh
from . import roots as rt
from . import tgeo
from .errors import HssntError
from .realize import (bergman_operator, builtin_odd, diastatic_exp, diastatic_log, dsl_roos_map, gudermann_composite,
                      harish_chandra, odd_calculus, spectral_values, symplecto)

SUITES = ("roots", "kahler", "polydisk", "holo", "symp", "dual", "bergman", "duality", "tgeo", "all")
DEFAULT_ETA = {"holo": "tanh", "symp": "sinh"}


def _max(d):
    return max(d.values()) if isinstance(d, dict) else float(d)


def _scaled_p(sp, rng, top):
    """Random p vector with largest spectral value uniform in (0.05, top)."""
    X = sp.model.random_p(rng)
    return X * (rng.uniform(0.05, top) / spectral_values(sp, X)[0])


def suite_roots(sp, opts):
    d = sp.datum
    rng = np.random.default_rng(opts.seed)
    ok = rt.classify_type(d) == d.sys_type
    try:
        for a in d.positive:
            rt.weyl_signed_permutation(d, [a])
        signed = 0.0
    except HssntError:
        signed = 1.0
    return [("reconstruction", rt.reconstruction_residual(d), 1e-10),
            ("norm_balance", rt.norm_balance_residual(d), 1e-10),
            ("H_orthogonality", rt.orth_residual(d), 1e-10),
            ("bracket_grading", rt.bracket_grading_residual(d, rng, 50), 1e-10),
            ("type_consistency", 0.0 if ok else 1.0, 0.0),
            ("weyl_signed_permutations", signed, 0.0)]


def suite_kahler(sp, opts):
    m, d, K = sp.model, sp.datum, sp.kahler
    out = [("zeta_central", kh.centrality_residual(m, K.zeta), 1e-10),
           ("complex_structure", _max(kh.complex_structure_residuals(K)), 1e-10),
           ("Z_norm", kh.z_norm_residual(d, K), 1e-10),
           ("Z_brackets", _max(kh.z_bracket_residuals(m, d, K)), 1e-10),
           ("J_mapping", _max(kh.verify_J_mapping(m, d, K)), 1e-10)]
    H = d.H_tilde[0][m.p_slice]
    out.append(("omega0_orientation", abs(float(H @ K.omega0 @ (K.J0 @ H)) - 4.0 / d.C), 1e-10))
    return out


def suite_polydisk(sp, opts):
    m, d, K = sp.model, sp.datum, sp.kahler
    P = kh.polydisk(m, d, K)
    return [(k, v, 1e-10) for k, v in P.residuals.items()] + [
        ("Jp_restriction", kh.jp_restriction_residual(m, d, K), 1e-10),
        ("torus_action", kh.torus_action_residual(m, d, K), 1e-10)]


def _analytic(sp, eta, which, n, seed, star=False):
    rng = np.random.default_rng(seed)
    fn = {("G", False): gv.evaluate_G, ("F", False): gv.evaluate_F,
          ("G", True): gv.evaluate_G_star, ("F", True): gv.evaluate_F_star}[(which, star)]
    top = np.pi / 2 - 0.1 if star else 2.0
    eta_map = builtin_odd(eta)
    if np.isfinite(eta_map.radius):
        top = min(top, 0.95 * eta_map.radius)
    worst = 0.0
    for _ in range(n):
        x = gv.sample_axis(sp, rng, top, min_val=1e-2)
        for a in sp.datum.positive:
            worst = max(worst, abs(fn(sp, eta_map, a, x) - 1.0))
    return worst


def suite_holo(sp, opts):
    eta = opts.eta or "tanh"
    rep = gv.check_holomorphic(sp, eta, n_samples=opts.samples, seed=opts.seed)
    blocks = gv.check_block_scalars(sp, eta, n_samples=3, seed=opts.seed)
    return [(c.name, c.max_residual, c.tol) for c in rep.checks] + [
        ("G_equals_1", _analytic(sp, eta, "G", 100, opts.seed), 1e-9),
        ("block_G_crosscheck", blocks.check("block_G").max_residual, 1e-5)]


def suite_symp(sp, opts):
    eta = opts.eta or "sinh"
    rep = gv.check_symplectic(sp, eta, n_samples=opts.samples, seed=opts.seed)
    blocks = gv.check_block_scalars(sp, eta, n_samples=3, seed=opts.seed)
    return [(c.name, c.max_residual, c.tol) for c in rep.checks] + [
        ("F_equals_1", _analytic(sp, eta, "F", 100, opts.seed), 1e-9),
        ("block_F_crosscheck", blocks.check("block_F").max_residual, 1e-5)]


def suite_dual(sp, opts):
    D = dual_mod.dual_of(sp)
    h = gv.check_holomorphic(sp, "tan", n_samples=opts.samples, seed=opts.seed, dual=True)
    s = gv.check_symplectic(sp, "sin", n_samples=opts.samples, seed=opts.seed, dual=True)
    return [("dual_jacobi", dual_mod.dual_jacobi_residual(D), 1e-10),
            ("dual_inner_identity", float(np.max(np.abs(D.model.inner - np.eye(D.model.dim_g)))), 1e-10),
            ("dual_bracket_relations", dual_mod.feq2_dual_residual(D), 1e-10),
            ("dual_imaginary_roots", dual_mod.dual_root_residual(D), 1e-10),
            ("dual_polydisk_su2", dual_mod.dual_polydisk_residual(D), 1e-10),
            ("G_star_tan_equals_1", _analytic(sp, "tan", "G", 100, opts.seed, star=True), 1e-9),
            ("F_star_sin_equals_1", _analytic(sp, "sin", "F", 100, opts.seed, star=True), 1e-9),
            ("holomorphic_tan_star", h.check("holomorphic").max_residual, 1e-5),
            ("symplectic_sin_star", s.check("symplectic").max_residual, 1e-5)]


def suite_bergman(sp, opts):
    rng = np.random.default_rng(opts.seed)
    m = sp.model
    dsl = trip = 0.0
    n = max(50, opts.samples)
    for _ in range(n):
        z = _scaled_p(sp, rng, 0.95)
        ref = odd_calculus(sp, z, "sinh_artanh").coeffs
        dsl = max(dsl, float(np.linalg.norm(dsl_roos_map(sp, z).coeffs - ref)))
        trip = max(trip, float(np.max(np.abs(diastatic_exp(sp, diastatic_log(sp, z)).coeffs - z.coeffs))))
    # Bergman operator on a: eigenvalue (1 - l^2)^2 along each H~_i
    x = rng.uniform(0.1, 0.9, sp.rank)
    B = bergman_operator(sp, sp.from_a(x))
    eig = 0.0
    for i in range(sp.rank):
        H = sp.H_tilde[i][m.p_slice]
        H = H / np.linalg.norm(H)
        eig = max(eig, abs(float(H @ B @ H) - (1 - x[i] ** 2) ** 2))
    return [("dsl_roos_vs_calculus", dsl, 1e-8), ("diastatic_roundtrip", trip, 1e-9),
            ("bergman_on_a", eig, 1e-10)]


def suite_duality(sp, opts):
    rng = np.random.default_rng(opts.seed)
    D = dual_mod.dual_of(sp)
    m = sp.model
    n = max(50, opts.samples)
    paths = tan_ = sin_ = dd = eq = 0.0
    for _ in range(n):
        X = _scaled_p(sp, rng, 2.0)
        g = gudermann_composite(sp, X)
        paths = max(paths, float(np.max(np.abs(g.coeffs - gudermann_composite(sp, X, "arcsin_tanh").coeffs))))
        tan_ = max(tan_, float(np.max(np.abs(dual_mod.omega_eta_star(D, g, "tan").coeffs - symplecto(sp, X).coeffs))))
        sin_ = max(sin_, float(np.max(np.abs(dual_mod.omega_eta_star(D, g, "sin").coeffs - harish_chandra(sp, X).coeffs))))
        Y = _scaled_p(sp, rng, 1.4)
        Ys = dual_mod.iota(D, Y.coeffs)
        dd = max(dd, float(np.max(np.abs(dual_mod.diastatic_exp_dual(D, dual_mod.diastatic_log_dual(D, Ys)).coeffs - Ys.coeffs))))
        A = expm(np.tensordot(m.random_k(rng).coeffs, D.model.ad_basis, axes=1))
        lhs = dual_mod.omega_eta_star(D, dual_mod.iota(D, A @ Ys.coeffs), "tan").coeffs
        rhs = A @ dual_mod.omega_eta_star(D, Ys, "tan").coeffs
        eq = max(eq, float(np.max(np.abs(lhs - rhs))))
    return [("gd_paths_agree", paths, 1e-10), ("tan_of_gd_is_symplecto", tan_, 1e-9),
            ("sin_of_gd_is_harish_chandra", sin_, 1e-9), ("dual_diastatic_roundtrip", dd, 1e-9),
            ("dual_equivariance", eq, 1e-9)]


def suite_tgeo(sp, opts):
    r = sp.rank
    full = tgeo.canonical_basis(np.eye(r))
    vertex = tgeo.canonical_basis([np.ones(r)])
    out = [("a_plus_Ja_is_lts", tgeo.lts_residual(sp, tgeo.complexified(sp, full)), 1e-9),
           ("abra_H_basis", tgeo.abra_residual(sp, full.basis), 1e-9),
           ("abra_vertex", tgeo.abra_residual(sp, vertex.basis), 1e-9),
           ("restriction_vertex_tanh",
            tgeo.restriction_check(sp, vertex, "tanh", opts.samples, opts.seed).checks[0].max_residual, 1e-9)]
    if r == 2:
        bad = 0
        for cell in tgeo.rank2_grid():
            sub = tgeo.canonical_basis(cell)
            h = tgeo.has_clts(sub)
            agree = h == tgeo.verify_lts(sp, tgeo.complexified(sp, sub)) == tgeo.abra_check(sp, sub.basis)
            for eta in ("sinh", "tanh", "loi_mossa"):
                agree &= tgeo.restriction_check(sp, sub, eta, 3, opts.seed).passed == h
            bad += 0 if agree else 1
        dirs = tgeo.clts_directions()
        expect = ((0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0))
        out += [("grid_disagreements", float(bad), 0.0),
                ("clts_directions", 0.0 if dirs == expect else 1.0, 0.0)]
    return out


_RUNNERS = {"roots": suite_roots, "kahler": suite_kahler, "polydisk": suite_polydisk,
            "holo": suite_holo, "symp": suite_symp, "dual": suite_dual, "bergman": suite_bergman,
            "duality": suite_duality, "tgeo": suite_tgeo}


def run_suite(sp, name, opts):
    if name == "all":
        out = []
        for k in SUITES[:-1]:
            out += [(f"{k}.{n}", r, t) for n, r, t in _RUNNERS[k](sp, opts)]
        return out
    return _RUNNERS[name](sp, opts)
