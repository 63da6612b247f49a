import math
from fractions import Fraction

import numpy as np
import pytest

from designrank import (
    PointConfig,
    affine_dimension,
    build_sg_design_matrix,
    dependency_row,
    exact_rank_rational,
    generate_lines_config,
    grid_config,
    mr3_check,
    mr_delta,
    sg_delta,
    sgk_check,
    special_lines,
)
from designrank.geometry import CollinearityWarning, sgk_min_count
from oracles import brute_special_lines, collinear


def general_position(n, d=3, seed=0):
    rng = np.random.default_rng(seed)
    pts = [tuple(int(x) for x in rng.integers(-1000, 1000, size=d)) for _ in range(n)]
    C = PointConfig(tuple(pts))
    assert brute_special_lines(C.points) == []
    return C


def test_config_validation():
    with pytest.raises(ValueError):
        PointConfig(((0, 0), (0, 0)))
    PointConfig(((0, 0), (0, 0)), distinct_required=False)
    with pytest.raises(ValueError):
        PointConfig(((0, 0), (1,)))
    with pytest.raises(ValueError):
        PointConfig(((0,), (1,)), colors=(1, 4))


class TestSpecialLines:
    def test_three_collinear(self):
        lines = special_lines(PointConfig(((0, 0), (1, 1), (2, 2))))
        assert [ln.members for ln in lines] == [(0, 1, 2)]

    def test_grid(self):
        lines = special_lines(grid_config())
        assert len(lines) == 8
        assert [ln.members for ln in lines] == brute_special_lines(grid_config().points)

    def test_general_position(self):
        assert special_lines(general_position(6, d=2, seed=3)) == []

    def test_random_against_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(15):
            n = int(rng.integers(3, 30))
            pts = {tuple(int(x) for x in rng.integers(0, 4, size=2)) for _ in range(n)}
            C = PointConfig(tuple(sorted(pts)))
            assert [ln.members for ln in special_lines(C)] == brute_special_lines(C.points)

    def test_float_tolerance_and_warning(self):
        C = PointConfig(((0.0, 0.0), (1.0, 1e-12), (2.0, 0.0), (0.0, 1.0)))
        assert [ln.members for ln in special_lines(C)] == [(0, 1, 2)]
        near = PointConfig(((0.0, 0.0), (1.0, 5e-9), (2.0, 0.0)))
        with pytest.warns(CollinearityWarning):
            assert special_lines(near) == []


class TestDelta:
    def test_one_line(self):
        C = PointConfig(tuple((i, 3 * i) for i in range(6)))
        assert sg_delta(C) == 1

    def test_grid(self):
        # an edge midpoint sees its row, its column and nothing else: 5 points
        assert sg_delta(grid_config()) == Fraction(5, 9)
        assert sg_delta(grid_config(), include_self=False) == Fraction(4, 9)

    def test_general_position(self):
        assert sg_delta(general_position(5)) == 0


class TestDependencyRow:
    def test_midpoint(self):
        assert dependency_row((0, 0), (2, 0), (1, 0)).coefficients == (Fraction(1, 2), Fraction(1, 2), -1)

    def test_diagonal(self):
        assert dependency_row((0, 0), (3, 3), (1, 1)).coefficients == (Fraction(2, 3), Fraction(1, 3), -1)

    def test_exact_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = [Fraction(int(x)) for x in rng.integers(-9, 10, size=3)]
            u = [Fraction(int(x)) or Fraction(1) for x in rng.integers(-5, 6, size=3)]
            s, t = Fraction(int(rng.integers(1, 9)), 7), Fraction(-int(rng.integers(1, 9)), 5)
            vj = tuple(x + s * y for x, y in zip(a, u))
            vk = tuple(x + t * y for x, y in zip(a, u))
            al, be, ga = dependency_row(tuple(a), vj, vk).coefficients
            assert al + be + ga == 0 and 0 not in (al, be, ga)
            assert all(al * x + be * y + ga * z == 0 for x, y, z in zip(a, vj, vk))

    def test_errors(self):
        with pytest.raises(ValueError):
            dependency_row((0, 0), (1, 0), (0, 1))
        with pytest.raises(ValueError):
            dependency_row((0, 0), (0, 0), (1, 1))


class TestDesignMatrix:
    def test_five_collinear(self):
        C = PointConfig(tuple((i, 2 * i - 1) for i in range(5)))
        A, prof = build_sg_design_matrix(C)
        assert A.shape == (20, 5)
        V = np.array(C.points, dtype=object)
        assert all(x == 0 for x in (A.entries @ V).flat)
        assert prof.as_tuple() == (3, 12, 6)

    def test_grid_rank(self):
        C = grid_config()
        A, prof = build_sg_design_matrix(C)
        assert (prof.q, prof.t) == (3, 6)
        assert prof.k >= 3 * (math.floor(sg_delta(C) * C.n) - 1)
        # rows sum to zero, so the kernel holds the all-ones vector as well as both coordinates
        assert C.n - exact_rank_rational(A).value == affine_dimension(C) + 1

    def test_dimension_invariant(self):
        for L in (1, 2, 3):
            C = generate_lines_config(L, 4, 2 * L, seed=L)
            A, _ = build_sg_design_matrix(C)
            assert affine_dimension(C) <= C.n - exact_rank_rational(A).value

    def test_point_off_lines(self):
        C = PointConfig(((0, 0), (1, 0), (2, 0), (5, 5)))
        with pytest.raises(ValueError):
            build_sg_design_matrix(C)

    def test_pair_intersections_bounded(self):
        A, prof = build_sg_design_matrix(generate_lines_config(2, 7, 2, seed=2))
        assert prof.t <= 6


class TestDimensionAndGenerators:
    def test_affine_dimension(self):
        assert affine_dimension(PointConfig(((3, 4),))) == 0
        assert affine_dimension(grid_config()) == 2
        assert affine_dimension(PointConfig(tuple((i, i) for i in range(7)))) == 1
        assert affine_dimension(PointConfig(((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)))) == 1

    def test_single_line(self):
        C = generate_lines_config(1, 5, 2, seed=0)
        assert C.n == 5 and sg_delta(C) == 1 and affine_dimension(C) == 1

    def test_three_skew_lines(self):
        C = generate_lines_config(3, 4, 6, seed=0)
        assert C.n == 12 and sg_delta(C) == Fraction(1, 3)
        assert affine_dimension(C) == 5

    def test_deterministic(self):
        assert generate_lines_config(3, 4, 3, seed=9) == generate_lines_config(3, 4, 3, seed=9)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            generate_lines_config(3, 4, 2)
        with pytest.raises(ValueError):
            generate_lines_config(2, 2, 4)

    def test_sg_theorem_bound(self):
        for L in range(1, 5):
            C = generate_lines_config(L, 3, 2 * L, seed=L)
            delta = sg_delta(C)
            assert affine_dimension(C) < 13 / delta**2
            if delta == 1:
                assert affine_dimension(C) <= 10


def _mr_oracle(C):
    """Definitional two-color value by direct enumeration of point pairs."""
    P, col = C.points, C.colors
    best = None
    for p in range(C.n):
        c = col[p]
        on = set()
        for q in range(C.n):
            if q == p:
                continue
            line = [r for r in range(C.n) if r in (p, q) or collinear(P[p], P[q], P[r])]
            if len({col[r] for r in line}) == 2:
                on.update(r for r in line if col[r] == c)
        val = Fraction(len(on), col.count(c))
        best = val if best is None else min(best, val)
    return best


class TestColored:
    def test_alternating_line(self):
        C = PointConfig(tuple((i, 0) for i in range(6)), colors=(1, 2, 1, 2, 1, 2))
        assert mr_delta(C) == 1

    def test_single_blue(self):
        reds = general_position(5, d=2, seed=7).points
        C = PointConfig(reds + ((10**6, 1),), colors=(1,) * 5 + (2,))
        assert mr_delta(C) == _mr_oracle(C) == Fraction(1, 5)

    def test_random_against_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            pts = sorted({tuple(int(x) for x in rng.integers(0, 4, size=2)) for _ in range(10)})
            colors = [1, 2] + [int(c) for c in rng.integers(1, 3, size=len(pts) - 2)]
            C = PointConfig(tuple(pts), colors=tuple(colors))
            assert mr_delta(C) == _mr_oracle(C)

    def test_missing_class(self):
        with pytest.raises(ValueError):
            mr_delta(PointConfig(((0, 0), (1, 0)), colors=(1, 1)))

    def test_mr3(self):
        assert mr3_check(PointConfig(((0, 0), (1, 0), (2, 0)), colors=(1, 2, 3)))
        assert not mr3_check(PointConfig(((0, 0), (1, 0)), colors=(1, 1)))
        colors = (1, 1, 1, 2, 3, 2, 3, 2, 3)
        assert not mr3_check(PointConfig(grid_config().points, colors=colors))


class TestSGk:
    def test_k1_matches_sg_delta(self):
        C = grid_config()
        for num in range(10):
            delta = Fraction(num, 9)
            assert sgk_check(C, 1, delta) == (sg_delta(C) >= delta)

    def test_planar_k2(self):
        # every plane through two points of a planar set contains all of them
        C = grid_config()
        assert sgk_check(C, 2, Fraction(1, 9))
        assert sgk_min_count(C, 2) == 9

    def test_general_position_k2(self):
        assert not sgk_check(general_position(7), 2, Fraction(1, 2))

    def test_star_variant(self):
        C = grid_config()
        assert sgk_check(C, 1, sg_delta(C), star=True)

    def test_budget(self):
        with pytest.raises(ValueError):
            sgk_check(grid_config(), 3, Fraction(1, 2), budget=10)

    def test_float_rejected(self):
        with pytest.raises(ValueError):
            sgk_check(PointConfig(((0.5, 0.0), (1.0, 1.0))), 1, Fraction(1, 2))
