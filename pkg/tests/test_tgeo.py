import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hssnt import build_space
from hssnt.errors import DependentInput
from hssnt.tgeo import (abra_check, abra_residual, canonical_basis, clts_directions, complexified,
                        has_clts, lts_residual, rank2_grid, restriction_check, restriction_residual,
                        verify_lts)


@pytest.fixture(scope="module")
def su22():
    return build_space("su:2,2")


def test_canonical_examples():
    c = canonical_basis([[1, 1], [2, 0]])
    assert np.allclose(c.basis, np.eye(2)) and c.pivots == (0, 1)
    c = canonical_basis([[1, 0, 1], [0, 1, -1]])
    assert np.allclose(c.basis, [[1, 0, 1], [0, 1, -1]]) and c.pivots == (0, 1)
    assert np.allclose(c.coefficients().ravel(), [1, -1])
    c = canonical_basis([[1, 0]])
    assert np.allclose(c.basis, [[1, 0]])


def test_dependent_input():
    with pytest.raises(DependentInput):
        canonical_basis([[1, 2], [2, 4]])


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=3))
def test_canonical_idempotent_and_scale_free(rows):
    A = np.array(rows, dtype=float)
    if np.linalg.matrix_rank(A) < len(rows):
        return
    c = canonical_basis(A)
    assert np.allclose(canonical_basis(c.basis).basis, c.basis)
    assert np.allclose(canonical_basis(-2.5 * A).basis, c.basis)
    assert has_clts(c) == has_clts(canonical_basis(A[::-1]))


@pytest.mark.parametrize("rows,expected", [([[1, 1]], True), ([[1, 2]], False),
                                           ([[1, 0, 1], [0, 1, 1]], False), ([[1, 0, 1], [0, 1, 0]], True),
                                           ([[1, -1, 0]], True)])
def test_has_clts(rows, expected):
    assert has_clts(canonical_basis(rows)) is expected


def test_verify_lts_examples(su22):
    full = canonical_basis(np.eye(2))
    assert verify_lts(su22, complexified(su22, full))
    assert not verify_lts(su22, complexified(su22, canonical_basis([[1, 2]])))
    assert verify_lts(su22, list(np.eye(su22.model.dim_p)))


def test_abra_examples(su22):
    assert abra_check(su22, np.eye(2))
    assert abra_check(su22, [[1, 1]])
    assert not abra_check(su22, [[1, 2]])


def test_abra_coefficient_32(su22):
    # [[V, J V], J V] for V = H~1 + 2 H~2 has H~ coordinates (4, 32)
    from hssnt.tgeo import _Jfull, _pvec
    st = su22.model.struct
    V = _pvec(su22, [1.0, 2.0])
    JV = _Jfull(su22, V)
    br = lambda a, b: np.einsum("i,j,ijk->k", a, b, st)
    out = br(br(V, JV), JV)
    assert np.allclose(su22.a_coords(out), [4.0, 32.0])


def test_restriction_examples(su22):
    sub = canonical_basis([[1, 1]])
    assert restriction_residual(su22, sub, "tanh", [0.8]) < 1e-12
    assert restriction_check(su22, canonical_basis([[1, 2]]), "id").passed
    assert not restriction_check(su22, canonical_basis([[1, 2]]), "sinh").passed


def test_rank2_grid_size():
    cells = rank2_grid()
    assert sum(len(c) == 1 for c in cells) == 24
    # lines through 0: four carry 4 grid points, four carry 2, so 4*12 + 4*2 dependent ordered pairs
    assert len(cells) == 24 + 24 * 23 - 56


def test_clts_directions():
    assert clts_directions() == ((0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0))


@pytest.mark.parametrize("key", ["su:2,2", "sp:2"])
def test_three_routes_agree_on_grid(key):
    sp = build_space(key)
    for cell in rank2_grid():
        sub = canonical_basis(cell)
        h = has_clts(sub)
        assert verify_lts(sp, complexified(sp, sub)) == h, cell
        assert abra_check(sp, sub.basis) == h, cell


def test_full_a_is_lts_rank3():
    sp = build_space("sp:3")
    assert lts_residual(sp, complexified(sp, canonical_basis(np.eye(3)))) < 1e-9
    assert abra_residual(sp, [[1, -1, 1]]) < 1e-9
