from fractions import Fraction

import numpy as np
import pytest
import sympy

from designrank import ScalarDomain, ScalarMatrix, exact_rank_rational, numerical_rank, rank, rank_mod_p
from designrank.geometry import build_sg_design_matrix, grid_config
from oracles import rational_fill, sympy_rank


def test_identity_numerical():
    r = numerical_rank(np.eye(4))
    assert r.value == 4 and r.method == "svd-threshold" and r.tolerance > 0


def test_outer_product():
    rng = np.random.default_rng(0)
    assert numerical_rank(np.outer(rng.normal(size=5), rng.normal(size=3))).value == 1


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        numerical_rank(np.array([[np.inf, 1.0]]))


def test_exact_small():
    r = exact_rank_rational([[1, 2], [2, 4]])
    assert r.value == 1 and r.tolerance is None


def test_duplicated_row():
    rng = np.random.default_rng(3)
    M = rng.integers(-9, 10, size=(6, 6))
    M[5] = M[2]
    assert exact_rank_rational(M.tolist()).value == sympy.Matrix(M.tolist()).rank()


def test_collinear_dependency_rows():
    pts = tuple((Fraction(i), Fraction(2 * i + 1)) for i in range(5))
    from designrank.geometry import PointConfig

    A, _ = build_sg_design_matrix(PointConfig(pts))
    # five collinear points: the row space has dimension n - 1 - dim
    assert exact_rank_rational(A).value == 3


def test_exact_matches_sympy():
    rng = np.random.default_rng(7)
    for _ in range(60):
        m, n = rng.integers(1, 9, size=2)
        mask = rng.random((m, n)) < rng.uniform(0.2, 1.0)
        A = rational_fill(rng, mask)
        if rng.random() < 0.3 and m > 1:
            A[-1] = A[0] * Fraction(3, 2)
        assert exact_rank_rational(ScalarMatrix(A)).value == sympy_rank(A.tolist())


def test_rejects_complex_domain():
    with pytest.raises(ValueError):
        exact_rank_rational(ScalarMatrix([[1.5]], ScalarDomain("complex")))


def test_mod_p_examples():
    assert rank_mod_p(np.eye(4, dtype=int), 7).value == 4
    assert rank_mod_p([[1, 1], [1, 1]], 2).value == 1
    # full rank over Q, singular mod 5
    assert rank_mod_p([[1, 2], [3, 1]], 5).value == 1
    with pytest.raises(ValueError):
        rank_mod_p([[1]], 6)


def test_mod_p_never_exceeds_rational():
    rng = np.random.default_rng(9)
    for p in (2, 3, 101):
        for _ in range(30):
            M = rng.integers(-4, 5, size=tuple(rng.integers(1, 7, size=2)))
            assert rank_mod_p(M, p).value <= exact_rank_rational(M.tolist()).value


def test_large_prime_uses_object_path():
    p = 2**61 - 1
    assert rank_mod_p([[1, 2], [2, 4]], p).value == 1


def test_float_agrees_on_grid_design():
    A, _ = build_sg_design_matrix(grid_config())
    assert numerical_rank(A).value == exact_rank_rational(A).value == 6


def test_dispatch():
    assert rank([[1, 2], [2, 4]]).method == "fraction-free-elimination"
    assert rank([[1, 2], [2, 4]], exact=False).method == "svd-threshold"
    assert rank(ScalarMatrix([[1, 2]], ScalarDomain.prime(3))).method == "modular-elimination"
