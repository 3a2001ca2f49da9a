import numpy as np
import pytest

from hssnt import build_space
from hssnt.errors import NonPrincipalPoint, OutsideCutLocus, SingularJacobi
from hssnt.geomverify import (VerifyReport, block_scalar_gap, block_scalars, chart_kahler,
                              check_block_scalars, check_equivariance, check_holomorphic,
                              check_symplectic, differential, evaluate_F, evaluate_F_star,
                              evaluate_G, evaluate_G_star, exact_vs_fd, fd_jacobian, is_principal,
                              jacobi_operator, jacobi_phi, sample_axis, sample_points,
                              tanh_F_closed_form, uniqueness_residuals)
from hssnt.realize import BUILTIN_NAMES, GeneralHMap


@pytest.mark.parametrize("t", [-2.0, -1e-7, 0.0, 1e-7, 3.0])
def test_phi(t):
    ref = 1.0 if t == 0 else (np.sinh(np.sqrt(t)) / np.sqrt(t) if t > 0 else np.sin(np.sqrt(-t)) / np.sqrt(-t))
    assert jacobi_phi(np.array([t]))[0] == pytest.approx(ref, rel=1e-13)


def test_jacobi_at_zero_is_identity(space):
    E = jacobi_operator(space, np.zeros(space.model.dim_p))
    assert np.allclose(E, np.eye(space.model.dim_p))
    ck = chart_kahler(space, np.zeros(space.model.dim_p))
    assert np.allclose(ck.J, space.J0) and np.allclose(ck.omega, space.J0.T)


@pytest.mark.parametrize("x", [0.3, 0.7, 1.9])
def test_rank1_jacobi_eigenvalues(x):
    # Jacobi fields on the hyperbolic disc: 1 along v, sinh(2x)/(2x) along J0 v
    sp = build_space("su11")
    v = sp.from_a([x]).coeffs
    assert np.allclose(np.linalg.eigvalsh(jacobi_operator(sp, v)), sorted([1.0, np.sinh(2 * x) / (2 * x)]))
    if 2 * x < np.pi:
        assert np.allclose(np.linalg.eigvalsh(jacobi_operator(sp, v, dual=True)),
                           sorted([1.0, np.sin(2 * x) / (2 * x)]))
    else:
        with pytest.raises(SingularJacobi):
            jacobi_operator(sp, v, dual=True)


def test_dual_jacobi_singular_at_cut_locus():
    sp = build_space("su11")
    with pytest.raises(SingularJacobi):
        jacobi_operator(sp, sp.from_a([np.pi / 2]).coeffs, dual=True)


def test_chart_kahler_invariants(space, rng):
    _, X = sample_points(space, 1, seed=3)[0]
    res = chart_kahler(space, X).residuals()
    assert res["J_squared"] < 1e-9 and res["omega_antisym"] < 1e-9


def test_differential_identity(space, rng):
    X, u = rng.standard_normal(space.model.dim_p), rng.standard_normal(space.model.dim_p)
    assert np.allclose(differential(space, "id", X, u), u, atol=1e-9)


def test_differential_exact_axis_example():
    sp = build_space("su11")
    u = sp.from_a([1.0]).coeffs[sp.model.p_slice]
    d = differential(sp, "tanh", [0.5], u, mode="exact_axis")
    assert np.allclose(d, u / np.cosh(0.5) ** 2)


def test_exact_axis_rejects_singular(rank2):
    with pytest.raises(NonPrincipalPoint):
        differential(rank2, "tanh", [0.4, 0.4], np.ones(rank2.model.dim_p), mode="exact_axis")


@pytest.mark.parametrize("eta", ["tanh", "sinh", "loi_mossa"])
def test_exact_matches_finite_difference(rank2, eta):
    assert exact_vs_fd(rank2, eta, n_samples=4, seed=1).passed


def test_fd_jacobian_of_linear_map(rng):
    A = rng.standard_normal((5, 5))
    J, gap = fd_jacobian(lambda x: A @ x, rng.standard_normal(5))
    assert np.allclose(J, A, atol=1e-9) and gap < 1e-9


def test_G_F_identity_examples():
    sp = build_space("su11")
    x = 0.6
    assert evaluate_G(sp, "id", "2e1", [x]) == pytest.approx(np.sinh(2 * x) / (2 * x))
    assert evaluate_F(sp, "id", "2e1", [x]) == pytest.approx(np.sinh(2 * x) / (2 * x))
    assert evaluate_F_star(sp, "id", "2e1", [x]) == pytest.approx(np.sin(2 * x) / (2 * x))


@pytest.mark.parametrize("key", ["su:2,2", "su:2,3", "sp:2", "su:1,2"])
def test_tanh_G_and_sinh_F_are_one(key):
    sp = build_space(key)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = sample_axis(sp, rng)
        xs = sample_axis(sp, rng, np.pi / 2 - 0.1)
        for a in sp.datum.positive:
            assert evaluate_G(sp, "tanh", a, x) == pytest.approx(1.0, abs=1e-9)
            assert evaluate_F(sp, "sinh", a, x) == pytest.approx(1.0, abs=1e-9)
            assert evaluate_G_star(sp, "tan", a, xs) == pytest.approx(1.0, abs=1e-9)
            assert evaluate_F_star(sp, "sin", a, xs) == pytest.approx(1.0, abs=1e-9)
            assert evaluate_F(sp, "tanh", a, x) == pytest.approx(tanh_F_closed_form(sp, a, x), rel=1e-9)


def test_G_star_outside_cube(rank2):
    with pytest.raises(OutsideCutLocus):
        evaluate_G_star(rank2, "tan", "2e1", [1.7, 0.3])


@pytest.mark.parametrize("eta,dual", [("id", False), ("tanh", False), ("sinh", False),
                                      ("loi_mossa", False), ("tan", True), ("sin", True), ("id", True)])
def test_block_scalars_crosscheck(rank2, eta, dual):
    rep = check_block_scalars(rank2, eta, n_samples=2, seed=4, dual=dual)
    assert rep.passed, rep.to_dict()


def test_block_scalars_continuous_near_strata():
    # approach the wall e1 = e2: tanh keeps G = 1 on every block
    sp = build_space("su:2,2")
    for eps in (1e-1, 1e-2, 1e-3):
        rows = block_scalars(sp, "tanh", [0.8 + eps, 0.8])
        assert max(abs(r[1] - 1.0) for r in rows) < 1e-6


def test_holomorphic_and_symplectic():
    sp = build_space("su:2,2")
    assert check_holomorphic(sp, "harish_chandra", n_samples=8).passed
    assert check_symplectic(sp, "symplecto", n_samples=8).passed
    assert not check_symplectic(sp, "harish_chandra", n_samples=8).passed
    assert not check_holomorphic(sp, "symplecto", n_samples=8).passed


def test_dual_holomorphic_and_symplectic():
    sp = build_space("su:1,2")
    assert check_holomorphic(sp, "tan", n_samples=6, dual=True).passed
    assert check_symplectic(sp, "sin", n_samples=6, dual=True).passed
    assert not check_holomorphic(sp, "sin", n_samples=6, dual=True).passed


def test_equivariance_reports(rank2):
    assert check_equivariance(rank2, "harish_chandra", n_samples=10).passed
    assert check_equivariance(rank2, "id", n_samples=5).check("equivariance").max_residual < 1e-12
    good = GeneralHMap(lambda x: x[0] * x[1] ** 2, 2, "good")
    bad = GeneralHMap(lambda x: x[0] + x[1], 2, "bad")
    assert check_equivariance(rank2, good, n_samples=10).passed
    rep = check_equivariance(rank2, bad, n_samples=10)
    assert rep.check("weyl_realization").passed and not rep.check("weyl_equivariance").passed


def test_report_deterministic(monkeypatch):
    sp = build_space("su:1,2")
    monkeypatch.setenv("HSSNT_THREADS", "1")
    a = check_holomorphic(sp, "tanh", n_samples=4, seed=9).to_dict()
    monkeypatch.setenv("HSSNT_THREADS", "4")
    b = check_holomorphic(sp, "tanh", n_samples=4, seed=9).to_dict()
    assert a == b


def test_sampling_is_principal(space):
    for x, X in sample_points(space, 10, seed=2):
        assert is_principal(space, x)
        assert np.all(np.abs(x) < 2.0)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_uniqueness_ode(name):
    r = uniqueness_residuals(name)
    if name == "tanh":
        assert r["G"] < 1e-12
    elif name == "sinh":
        assert r["F"] < 1e-12
    else:
        assert min(r["G"], r["F"]) >= 1e-3


def test_verify_report_shape():
    rep = VerifyReport("m", 3, 7, "su:2,2").add("a", 1e-12, 1e-9).add("b", np.inf, 1.0)
    d = rep.to_dict()
    assert [c["pass"] for c in d["checks"]] == [True, False]
    assert d["seed"] == 7 and not rep.passed
