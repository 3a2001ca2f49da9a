import numpy as np
import pytest

from hssnt import build_space
from hssnt.dual import (build_dual, cut_cube_membership, diastatic_exp_dual, diastatic_log_dual,
                        dual_of, dual_polydisk_residual, dual_root_residual, feq2_dual_residual,
                        iota, iota_inv, omega_eta_star, dual_jacobi_residual)
from hssnt.errors import OutsideCutLocus
from hssnt.realize import gudermann_composite, harish_chandra, spectral_values, symplecto

from conftest import scaled_p


def test_dual_structure(space):
    D = build_dual(space)
    assert dual_jacobi_residual(D) < 1e-12
    # compact form: -B* is the identity in these coordinates
    assert np.allclose(D.model.inner, np.eye(D.model.dim_g), atol=1e-12)
    assert feq2_dual_residual(D) < 1e-12
    assert dual_root_residual(D) < 1e-10
    assert dual_polydisk_residual(D) < 1e-10
    assert np.allclose(D.J0, space.J0)


def test_dual_ad_p_is_antisymmetric(space, rng):
    D = dual_of(space)
    X = np.zeros(D.model.dim_g)
    X[D.model.p_slice] = rng.standard_normal(D.model.dim_p)
    A = np.tensordot(X, D.model.ad_basis, axes=1)
    assert np.allclose(A, -A.T, atol=1e-12)


def test_iota_roundtrip(space, rng):
    D = dual_of(space)
    X = space.model.random_p(rng)
    Xs = iota(D, X.coeffs)
    assert Xs.home == "p*"
    assert np.allclose(iota_inv(D, Xs).coeffs, X.coeffs)


@pytest.mark.parametrize("x,inside", [([0.1], True), ([1.5, -1.5], True), ([1.58], False),
                                      ([0.0, -2.0], False)])
def test_cut_cube(x, inside):
    assert cut_cube_membership(x) is inside


def test_omega_star_examples():
    sp = build_space("su:2,2")
    D = dual_of(sp)
    out = omega_eta_star(D, D.from_a([0.7, 0.0]), "tan")
    assert np.allclose(sp.a_coords(out.coeffs), [np.tan(0.7), 0.0])
    X = D.from_a([0.4, -1.1])
    assert np.allclose(omega_eta_star(D, X, "id").coeffs, X.coeffs)
    assert np.allclose(omega_eta_star(D, D.from_a([0.0, 0.0]), "tan").coeffs, 0.0)


def test_outside_cut_locus(space):
    D = dual_of(space)
    with pytest.raises(OutsideCutLocus):
        omega_eta_star(D, D.from_a(np.full(space.rank, 1.6)), "sin")


def test_duality_roundtrip(space, rng):
    # tan(gd x) = sinh x and sin(gd x) = tanh x
    D = dual_of(space)
    X = scaled_p(space, rng, 2.0)
    g = gudermann_composite(space, X)
    assert np.allclose(omega_eta_star(D, g, "tan").coeffs, symplecto(space, X).coeffs, atol=1e-9)
    assert np.allclose(omega_eta_star(D, g, "sin").coeffs, harish_chandra(space, X).coeffs, atol=1e-9)


def test_literal_pairing_is_false(rank2, rng):
    # tan o gd does not give the tanh map: documents why the pairing is the other way round
    D = dual_of(rank2)
    X = scaled_p(rank2, rng, 2.0)
    g = gudermann_composite(rank2, X)
    assert np.max(np.abs(omega_eta_star(D, g, "tan").coeffs - harish_chandra(rank2, X).coeffs)) > 0.1


def test_dual_diastatic_roundtrip(space, rng):
    D = dual_of(space)
    Xs = iota(D, scaled_p(space, rng, 1.4).coeffs)
    back = diastatic_exp_dual(D, diastatic_log_dual(D, Xs))
    assert np.allclose(back.coeffs, Xs.coeffs, atol=1e-9)


def test_dual_equivariance(space, rng):
    from scipy.linalg import expm
    D = dual_of(space)
    m = D.model
    Xs = iota(D, scaled_p(space, rng, 1.3).coeffs)
    A = expm(np.tensordot(space.model.random_k(rng).coeffs, m.ad_basis, axes=1))
    lhs = omega_eta_star(D, iota(D, A @ Xs.coeffs), "tan").coeffs
    rhs = A @ omega_eta_star(D, Xs, "tan").coeffs
    assert np.allclose(lhs, rhs, atol=1e-9)
