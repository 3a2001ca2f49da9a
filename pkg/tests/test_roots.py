import numpy as np
import pytest

from hssnt import build_space
from hssnt.errors import NotSignedPermutation, RankMismatch
from hssnt.roots import (bracket_grading_residual, classify_type, norm_balance_residual,
                         orth_residual, parse_word, reconstruction_residual, reflection_matrix,
                         weyl_reflect, weyl_signed_permutation)


def expected_C(key):
    # Killing form is 2(p+q) tr(XY) on su(p,q) and 2(n+1) tr(XY) on sp(n,R);
    # H_gamma then has squared norm 1/(p+q), resp. 1/(n+1).
    fam, _, rest = key.partition(":")
    if key == "su11":
        return 0.5
    nums = [int(t) for t in rest.split(",")]
    return 1.0 / sum(nums) if fam == "su" else 1.0 / (nums[0] + 1)


def expected_multiplicities(key):
    """Restricted root multiplicities of the classical families."""
    if key == "su11":
        p = q = 1
    elif key.startswith("su"):
        p, q = (int(t) for t in key.split(":")[1].split(","))
    else:
        n = int(key.split(":")[1])
        out = {f"2e{i + 1}": 1 for i in range(n)}
        for i in range(n):
            for j in range(i + 1, n):
                out[f"e{i + 1}+e{j + 1}"] = out[f"e{i + 1}-e{j + 1}"] = 1
        return out
    out = {f"2e{i + 1}": 1 for i in range(p)}
    for i in range(p):
        for j in range(i + 1, p):
            out[f"e{i + 1}+e{j + 1}"] = out[f"e{i + 1}-e{j + 1}"] = 2
        if q > p:
            out[f"e{i + 1}"] = 2 * (q - p)
    return out


@pytest.mark.parametrize("key,label", [
    ("su11", "C1"), ("su:2,2", "C2"), ("su:1,2", "BC1"), ("su:2,3", "BC2"), ("sp:2", "C2"),
    ("sp:3", "C3"), ("su:3,3", "C3"),
])
def test_type(key, label):
    d = build_space(key).datum
    assert d.type_label == label
    assert classify_type(d) == d.sys_type


def test_C_matches_killing_normalization(space):
    assert space.C == pytest.approx(expected_C(space.model.key), rel=1e-12)


def test_multiplicities(space):
    assert space.datum.multiplicities == expected_multiplicities(space.model.key)
    assert sum(space.datum.multiplicities.values()) + space.rank == space.model.dim_p


def test_structural_residuals(space, rng):
    d = space.datum
    assert reconstruction_residual(d) < 1e-10
    assert norm_balance_residual(d) < 1e-10
    assert orth_residual(d) < 1e-10
    assert bracket_grading_residual(d, rng, 40) < 1e-10


def test_gamma_and_H_tilde(space):
    d = space.datum
    assert [a.label for a in d.Gamma] == [f"2e{i + 1}" for i in range(d.rank)]
    for i, g in enumerate(d.Gamma):
        assert g(np.eye(d.rank)[i]) == pytest.approx(2.0)
        assert np.allclose(d.H_tilde[i], 2 * d.H_vectors[i] / d.C)


def test_bar_map(rank2):
    d = rank2.datum
    assert d.bar("e1+e2").label == "e1-e2"
    assert d.bar("e1-e2").label == "e1+e2"
    assert d.bar("2e1").label == "2e1"


def test_from_a_rank_mismatch(space):
    with pytest.raises(RankMismatch):
        space.datum.from_a(np.zeros(space.rank + 1))


def test_a_coords_roundtrip(space, rng):
    x = rng.standard_normal(space.rank)
    assert np.allclose(space.a_coords(space.from_a(x).coeffs), x)


# Oracle: reflections of C_2 act on (e1, e2) by swapping and sign changes, written by hand.
@pytest.mark.parametrize("key", ["su:2,2", "sp:2", "su:2,3"])
@pytest.mark.parametrize("word,expected", [
    ([], ((0, 1), (1, 1))),
    (["e1-e2"], ((1, 0), (1, 1))),
    (["e1+e2"], ((1, 0), (-1, -1))),
    (["2e1"], ((0, 1), (-1, 1))),
    (["2e2"], ((0, 1), (1, -1))),
    (["2e1", "2e2"], ((0, 1), (-1, -1))),
])
def test_weyl_signed_permutation(key, word, expected):
    assert weyl_signed_permutation(build_space(key).datum, word) == expected


def test_reflection_is_involution(space):
    d = space.datum
    for a in d.positive:
        R = reflection_matrix(d, a)
        assert np.allclose(R @ R, np.eye(d.rank), atol=1e-12)
        assert np.allclose(weyl_reflect(d, a, a.H).coeffs, -a.H)


def test_parse_word():
    assert parse_word("2e1; e1-e2  e1+e2") == ["2e1", "e1-e2", "e1+e2"]


def test_unknown_root_label(space):
    with pytest.raises(KeyError):
        space.datum.root("3e1")


def test_not_signed_permutation_error_type():
    assert issubclass(NotSignedPermutation, Exception)
