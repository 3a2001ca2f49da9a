import numpy as np
import pytest

from hssnt import build_space
from hssnt.kahler import (ZETA_HAT, centrality_residual, complex_structure_residuals,
                          jp_restriction_residual, omega, polydisk, torus_action_residual,
                          verify_J_mapping, z_bracket_residuals, z_norm_residual)


def test_zeta_central_and_J0(space):
    m, K = space.model, space.kahler
    assert centrality_residual(m, K.zeta) < 1e-10
    res = complex_structure_residuals(K)
    assert max(res.values()) < 1e-10


def test_z_basis(space):
    m, d, K = space.model, space.datum, space.kahler
    assert z_norm_residual(d, K) < 1e-10
    assert max(z_bracket_residuals(m, d, K).values()) < 1e-10
    assert max(verify_J_mapping(m, d, K).values()) < 1e-10


def test_omega0_orientation_value(space):
    # omega0(u, w) = <J0 u, w>, so omega0(H~, J0 H~) = |J0 H~|^2 = |H~|^2 = 4/C
    m, K = space.model, space.kahler
    H = space.H_tilde[0]
    JH = np.zeros(m.dim_g)
    JH[m.p_slice] = K.J0 @ H[m.p_slice]
    val = omega(K, m, H, JH)
    assert val == pytest.approx(4.0 / space.C, rel=1e-12)
    assert val > 0


def test_su11_zeta_acts_as_minus_i():
    sp = build_space("su11")
    m = sp.model
    Z = m.to_matrix(sp.kahler.zeta)
    assert np.allclose(Z, ZETA_HAT, atol=1e-12)
    X = m.complex_to_p(np.array([[0.3 + 0.2j]]))
    assert np.allclose(m.p_to_complex(sp.J(X)), -1j * m.p_to_complex(X))


def test_sp1_zeta():
    sp = build_space("sp:1")
    Z = sp.model.to_matrix(sp.kahler.zeta).real
    assert np.allclose(Z, 0.5 * np.array([[0, 1], [-1, 0]]), atol=1e-12)


def test_polydisk(space):
    m, d, K = space.model, space.datum, space.kahler
    P = polydisk(m, d, K)
    scale = max(1.0, 4.0 / space.C)
    for k, v in P.residuals.items():
        assert v / scale < 1e-12, k
    assert jp_restriction_residual(m, d, K) < 1e-10
    assert torus_action_residual(m, d, K) < 1e-10
