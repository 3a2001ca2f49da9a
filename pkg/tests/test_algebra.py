import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hssnt.algebra import (AlgVec, Family, SpaceSpec, adjoint_action, bracket, build_model,
                           grading_residual, inner, inner_min_eigenvalue, jacobi_residual,
                           ad_selfadjoint_residual, theta_residual)
from hssnt.errors import InvalidSpec, ModelMismatch


def su_dims(p, q):
    n = p + q
    return n * n - 1, p * p + q * q - 1, 2 * p * q


def sp_dims(n):
    return n * (2 * n + 1), n * n, n * (n + 1)


@pytest.mark.parametrize("key,dims", [
    ("su11", su_dims(1, 1)), ("su:1,2", su_dims(1, 2)), ("su:2,2", su_dims(2, 2)),
    ("su:2,3", su_dims(2, 3)), ("sp:1", sp_dims(1)), ("sp:2", sp_dims(2)), ("sp:3", sp_dims(3)),
])
def test_dimensions(key, dims):
    m = build_model(key)
    assert (m.dim_g, m.dim_k, m.dim_p) == dims


def test_structure_identities(space):
    m = space.model
    assert jacobi_residual(m) < 1e-12
    assert theta_residual(m) < 1e-12
    assert grading_residual(m) < 1e-12
    assert inner_min_eigenvalue(m) > 0
    # the basis is orthonormal for -B(X, theta Y)
    assert np.allclose(m.inner, np.eye(m.dim_g), atol=1e-12)


def test_ad_p_symmetric_ad_k_antisymmetric(space, rng):
    m = space.model
    assert ad_selfadjoint_residual(m, m.random_p(rng)) < 1e-12
    A = np.tensordot(m.random_k(rng).coeffs, m.ad_basis, axes=1)
    assert np.allclose(A, -A.T, atol=1e-12)


def test_bracket_matches_matrix_commutator(space, rng):
    m = space.model
    X, Y = m.random_p(rng), m.random_k(rng)
    MX, MY = m.to_matrix(X), m.to_matrix(Y)
    ref = m.from_matrix(MX @ MY - MY @ MX)
    assert np.allclose(bracket(m, X, Y).coeffs, ref.coeffs, atol=1e-12)


def test_bracket_tags(space, rng):
    m = space.model
    P, K = m.random_p(rng), m.random_k(rng)
    assert bracket(m, P, P * 2.0 + m.random_p(rng)).home == "k"
    assert bracket(m, K, P).home == "p"


def test_adjoint_action_is_isometry(space, rng):
    m = space.model
    X = m.random_p(rng)
    Y = adjoint_action(m, m.random_k(rng), X)
    assert abs(inner(m, X, X) - inner(m, Y, Y)) < 1e-10
    assert Y.home == "p"


def test_complex_coordinate_roundtrip(space, rng):
    m = space.model
    X = m.random_p(rng)
    back = m.complex_to_p(m.p_to_complex(X))
    assert np.allclose(back.coeffs, X.coeffs, atol=1e-12)


def test_algvec_arithmetic_and_mismatch():
    a = build_model("su:2,2")
    b = build_model("sp:2")
    X = a.vec(np.arange(a.dim_p, dtype=float))
    assert np.allclose((2 * X - X).coeffs, X.coeffs)
    assert np.allclose((X / 2).coeffs, 0.5 * X.coeffs)
    with pytest.raises(ModelMismatch):
        _ = X + b.vec(np.zeros(b.dim_p))
    with pytest.raises(ModelMismatch):
        a.vec(np.zeros(5))


@pytest.mark.parametrize("text,family,params", [
    ("su:2,3", Family.SU_PQ, (2, 3)), ("su11", Family.SU_11, (1, 1)), ("sp:3", Family.SP_N_R, (3,)),
    (" SU:1,2 ", Family.SU_PQ, (1, 2)),
])
def test_spec_parse(text, family, params):
    s = SpaceSpec.parse(text)
    assert s.family == family and tuple(s.params) == params


@pytest.mark.parametrize("text", ["su:0,2", "su:3,2", "sp:0", "so:2,3", "su:2", "", "sp:a"])
def test_spec_parse_rejects(text):
    with pytest.raises(InvalidSpec):
        SpaceSpec.parse(text)


@given(p=st.integers(1, 4), dq=st.integers(0, 3))
def test_spec_key_roundtrip(p, dq):
    s = SpaceSpec.parse(f"su:{p},{p + dq}")
    assert SpaceSpec.parse(s.key) == s
    assert s.rank == p


@given(n=st.integers(1, 6))
def test_sp_key_roundtrip(n):
    s = SpaceSpec.parse(f"sp:{n}")
    assert SpaceSpec.parse(s.key) == s and s.rank == n
