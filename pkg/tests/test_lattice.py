import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from superpack.lattice import (
    CASE_I,
    CASE_II,
    CASE_III,
    Basis,
    basis_to_json,
    count_neighbors,
    density,
    enumeration_bound,
    get_case,
    hanner_verify,
    load_basis,
    parse_basis,
    verify_packing,
)
from superpack.reference import CASE_III_BASES, table_basis


def _exact_inverse(M):
    """Inverse of a 3x3 matrix of Fractions via the adjugate."""
    det = sum(
        (1 if s > 0 else -1) * M[0][i] * M[1][j] * M[2][k]
        for (i, j, k), s in (
            ((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
            ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1),
        )
    )
    inv = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [a for a in range(3) if a != j]
            c = [a for a in range(3) if a != i]
            minor = M[r[0]][c[0]] * M[r[1]][c[1]] - M[r[0]][c[1]] * M[r[1]][c[0]]
            inv[i][j] = (-1) ** (i + j) * minor / det
    return inv


def L1_exact():
    x, y, z = Fraction(1, 3), Fraction(1, 6), Fraction(1, 2)
    return [[-x, y, z], [z, -x, y], [y, z, -x]]


def test_basis_rejects_singular():
    with pytest.raises(ValueError, match="determinant too small"):
        Basis([[1, 0, 0], [0, 1, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        Basis([1, 2, 3])
    with pytest.raises(ValueError):
        Basis([[1, 0, 0], [0, 1, 0], [0, 0, math.nan]])


def test_cases():
    assert len(CASE_I) == 6 and len(CASE_II) == 6 and len(CASE_III) == 7
    assert (1, -1, 0) in CASE_I.representatives
    assert CASE_III.representatives[-1] == (1, 1, 1)
    assert get_case(1) is CASE_I and get_case("iii") is CASE_III and get_case(CASE_II) is CASE_II
    with pytest.raises(ValueError):
        get_case(4)


def test_density_examples():
    assert density(np.eye(3), 2) == pytest.approx(math.pi / 6, rel=1e-14)
    assert density(table_basis(1.0), 1) == pytest.approx(18 / 19, abs=1e-10)
    assert density(table_basis(2.0), 2) == pytest.approx(math.pi / math.sqrt(18), abs=1e-9)


def test_enumeration_bound_examples():
    assert enumeration_bound(np.eye(3), 2, 1) == (1, 1, 1)
    assert enumeration_bound(np.diag([2.0, 1, 1]), 2, 1) == (0, 1, 1)
    assert enumeration_bound(np.eye(3), 2, 0) == (0, 0, 0)
    with pytest.raises(ValueError):
        enumeration_bound(np.eye(3), 2, -1)


def test_enumeration_bound_L1_exact():
    # p = 1 so q = inf: bound_i = floor(max_j |inv_ij|)
    inv = _exact_inverse(L1_exact())
    oracle = tuple(math.floor(max(abs(v) for v in row)) for row in inv)
    B = np.array([[float(v) for v in row] for row in L1_exact()])
    assert enumeration_bound(B, 1.0, 1.0) == oracle


def test_lemma1_soundness_random():
    rng = np.random.default_rng(21)
    for _ in range(100):
        B = rng.standard_normal((3, 3))
        if abs(np.linalg.det(B)) < 0.1:
            continue
        p = rng.choice([1.0, 2.0, rng.uniform(1, 3)])
        mu = rng.uniform(0.5, 2)
        box = enumeration_bound(B, p, mu)
        rng_ = [range(-b - 1, b + 2) for b in box]
        for u in itertools.product(*rng_):
            if all(abs(ui) <= bi for ui, bi in zip(u, box)):
                continue
            assert np.sum(np.abs(B @ np.array(u)) ** p) ** (1 / p) > mu


def test_verify_identity():
    r = verify_packing(np.eye(3), 2, 1e-9)
    assert r.is_packing and r.min_norm == 1.0 and r.violators == []
    assert r.to_dict()["is_packing"] is True


def test_verify_shrunk_identity():
    r = verify_packing(0.9 * np.eye(3), 2, 1e-9)
    assert not r.is_packing
    assert r.min_norm == pytest.approx(0.9)
    assert (1, 0, 0) in r.violators and r.argmin in {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_verify_table3_p12():
    B = table_basis(1.2)
    r = verify_packing(B, 1.2, 1e-6)
    assert r.is_packing and abs(r.min_norm - 1) <= 1e-6
    assert r.argmin in CASE_III.representatives
    V = CASE_III.vectors @ B.matrix.T
    np.testing.assert_allclose((np.abs(V) ** 1.2).sum(axis=1), 1, atol=1e-9)


def test_verify_tol_range():
    with pytest.raises(ValueError):
        verify_packing(np.eye(3), 2, 0.01)


def test_hanner_examples():
    assert hanner_verify(table_basis(1.3), 1.3, 1e-6)
    assert not hanner_verify(np.eye(3), 1.5, 1e-6)
    with pytest.raises(ValueError):
        hanner_verify(table_basis(2.0), 2, 1e-6)
    with pytest.raises(ValueError):
        hanner_verify(np.eye(3), 1.0)


@pytest.mark.parametrize("p", [1.1, 1.2, 1.3, 1.4, 1.5])
def test_hanner_agrees_with_enumeration(p):
    B = table_basis(p)
    assert hanner_verify(B, p, 1e-6)
    assert verify_packing(B, p, 1e-6).is_packing


def test_neighbor_examples():
    assert count_neighbors(np.eye(3), 2, 1e-9) == 6
    assert count_neighbors(table_basis(2.0), 2, 1e-6) == 12
    assert count_neighbors(table_basis(1.4), 1.4, 1e-6) == 14


def _unimodular(rng):
    U = np.eye(3, dtype=int)
    for _ in range(6):
        i, j = rng.choice(3, 2, replace=False)
        E = np.eye(3, dtype=int)
        E[i, j] = rng.choice([-1, 1])
        U = U @ E
    return U


def test_unimodular_invariance():
    rng = np.random.default_rng(5)
    for p in (1.0, 1.3, 1.5):
        B = table_basis(p).matrix
        for _ in range(5):
            BU = B @ _unimodular(rng)
            assert density(BU, p) == pytest.approx(density(B, p), abs=1e-9)
            assert verify_packing(BU, p, 1e-6).min_norm == pytest.approx(
                verify_packing(B, p, 1e-6).min_norm, abs=1e-9
            )
            assert count_neighbors(BU, p, 1e-6) == 14


def test_scaling():
    B = table_basis(1.5)
    for s in (0.5, 1.7, 3.0):
        assert density(B.scaled(s), 1.5) == pytest.approx(density(B, 1.5) / s**3, rel=1e-12)


def test_neighbor_bounds_on_tables():
    for p in list(CASE_III_BASES) + [1.6, 1.7, 1.8, 1.9, 2.0]:
        n = count_neighbors(table_basis(p), p, 1e-6)
        assert 12 <= n <= 26 and n % 2 == 0


# serialization --------------------------------------------------------------


def test_json_round_trip(tmp_path):
    B = table_basis(1.4)
    f = tmp_path / "b.json"
    f.write_text(json.dumps(basis_to_json(B, 1.4)))
    B2, p = load_basis(f)
    assert p == 1.4
    np.testing.assert_array_equal(B2.matrix, B.matrix)


def test_text_and_nested_forms():
    B, p = parse_basis("1 0 0\n0 2 0\n0 0 3\n")
    assert p is None and B.det == pytest.approx(6)
    B, _ = parse_basis('{"matrix": [[1,0,0],[0,1,0],[0,0,1]]}')
    assert B.det == 1
    B, p = parse_basis('[{"matrix": [2,0,0,0,2,0,0,0,2], "p": 3}, {"matrix": [1,0,0,0,1,0,0,0,1]}]')
    assert B.det == pytest.approx(8) and p == 3


@pytest.mark.parametrize(
    "text, msg",
    [
        ("1 0 0 0 1 0 0 0 zz", "'zz'"),
        ("1 0 0 0 1 0 0 0", "9 entries"),
        ('{"p": 2}', "matrix"),
        ("{bad json", "invalid JSON"),
    ],
)
def test_parse_errors(text, msg):
    with pytest.raises(ValueError, match=msg):
        parse_basis(text)
