import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from designrank import (
    LccConfig,
    generate_lines_config,
    lcc_audit,
    low_rank_sublist,
    normalize_generating_set,
    partition_iterate,
    random_line_triples,
    recovery_graph,
)
from designrank.lcc import LccPreconditionError, LowRankFailure, affine_span_members, min_vertex_cover
from oracles import brute_is_lcc, brute_min_vertex_cover, collinear, recovers, sympy_rank


def on_line(m, base=(1, 0, 0), direction=(0, 1, 2)):
    return LccConfig(tuple(tuple(b + t * u for b, u in zip(base, direction)) for t in range(m)))


def three_lines(m=30):
    return LccConfig(generate_lines_config(3, m // 3, 6, seed=0).points)


def coplanar_lines():
    pts = [(1, t, 0) for t in range(1, 11)] + [(1, 0, t) for t in range(1, 11)] + [(1, t, t) for t in range(1, 11)]
    return LccConfig(tuple(pts))


def random_small_lcc(rng, m):
    pool = [(1, a, b) for a in range(3) for b in range(3)] + [(1, 5, t) for t in range(4)]
    return LccConfig(tuple(pool[int(rng.integers(len(pool)))] for _ in range(m)))


class TestConfig:
    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            LccConfig(((1, 0), (0, 0)))

    def test_multiplicities(self):
        C = LccConfig.from_multiplicities([(1, 1), (1, 2)], [3, 2])
        assert C.m == 5 and C.multiplicities()[(1, 1)] == 3
        assert len(C.distinct()) == 2


class TestNormalize:
    def test_basis_plus_sum(self):
        C = normalize_generating_set([(1, 0), (0, 1), (1, 1)])
        assert all(p[0] == 1 for p in C.points)
        assert collinear(*C.points)

    def test_scaled_copies_collapse(self):
        C = normalize_generating_set([(1, 2, 3), (2, 4, 6), (0, 1, 0)])
        assert C.points[0] == C.points[1] and C.points[0] != C.points[2]

    def test_preserves_linear_rank(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            V = [tuple(int(x) for x in rng.integers(-4, 5, size=4)) for _ in range(6)]
            V = [v for v in V if any(v)]
            C = normalize_generating_set(V)
            assert sympy_rank(C.points) == sympy_rank(V)

    def test_already_normalized(self):
        pts = [(1, 0), (1, 1), (1, 3)]
        C = normalize_generating_set(pts)
        assert collinear(*C.points)

    def test_zero(self):
        with pytest.raises(ValueError):
            normalize_generating_set([(1, 0), (0, 0)])


class TestRecoveryGraph:
    def test_three_collinear(self):
        G = recovery_graph(on_line(3), 0)
        assert G.edges == {frozenset((1, 2))}

    def test_copy(self):
        C = LccConfig(((1, 0), (1, 0), (1, 5), (1, 7)))
        G = recovery_graph(C, 0)
        assert {frozenset((1, 2)), frozenset((1, 3))} <= G.edges
        # 0, 2 and 3 lie on one line of the plane, so {2, 3} also recovers index 0
        assert frozenset((2, 3)) in G.edges

    def test_general_position(self):
        C = LccConfig(((1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 3, 7)))
        assert all(not recovery_graph(C, i).edges for i in range(C.m))

    def test_predicate_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            C = random_small_lcc(rng, 9)
            for i in range(C.m):
                want = {frozenset((j, k)) for j, k in itertools.combinations(range(C.m), 2)
                        if recovers(C.points, i, j, k)}
                assert recovery_graph(C, i).edges == want


class TestCover:
    def test_against_brute(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            G = nx.gnp_random_graph(int(rng.integers(2, 13)), float(rng.uniform(0.1, 0.7)),
                                    seed=int(rng.integers(1 << 30)))
            cover, exact = min_vertex_cover(G)
            assert exact and len(cover) == brute_min_vertex_cover(G.nodes, G.edges)
            assert all(u in cover or v in cover for u, v in G.edges)

    def test_large_graph_is_a_cover(self):
        G = nx.gnp_random_graph(60, 0.2, seed=1)
        cover, exact = min_vertex_cover(G)
        assert not exact
        assert all(u in cover or v in cover for u, v in G.edges)
        mu = len(nx.max_weight_matching(G, maxcardinality=True))
        assert mu <= len(cover) <= 2 * mu


class TestAudit:
    def test_nine_on_a_line(self):
        A = lcc_audit(on_line(9))
        assert set(A.mu) == {4} and set(A.tau) == {7}
        assert A.is_lcc(Fraction(4, 9) - Fraction(1, 100)) is True
        assert A.delta_guaranteed == Fraction(4, 9)
        assert A.is_lcc(Fraction(7, 9)) is False

    def test_empty_graph_refuted(self):
        C = LccConfig(((1, 0, 0), (1, 1, 0), (1, 0, 1)))
        A = lcc_audit(C)
        assert A.delta_guaranteed == 0 and A.delta_refuted == 0
        assert A.is_lcc(Fraction(1, 3)) is False
        assert A.killing_set(Fraction(1, 3)) == (0, frozenset())

    def test_killing_set_kills(self):
        C = on_line(6)
        A = lcc_audit(C)
        i, D = A.killing_set(A.delta_refuted)
        rest = [x for x in range(C.m) if x not in D]
        assert not any(recovers(C.points, i, j, k) for j, k in itertools.combinations(rest, 2))

    def test_against_brute(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            m = int(rng.integers(3, 10))
            C = random_small_lcc(rng, m)
            A = lcc_audit(C)
            assert all(mu <= tau <= 2 * mu for mu, tau in zip(A.mu, A.tau))
            for s in range(m + 1):
                verdict = A.is_lcc(Fraction(s, m))
                assert verdict is not None
                assert verdict == brute_is_lcc(C.points, s)

    def test_to_dict(self):
        d = lcc_audit(on_line(4)).to_dict()
        assert d["mu_min"] == 1 and d["delta_guaranteed"] == "1/4"


class TestTriples:
    def test_single_line(self):
        C = on_line(4)
        T = random_line_triples(C, seed=3)
        assert len(T) == 12

    def test_two_distinct_only(self):
        C = LccConfig(((1, 1), (1, 1), (1, 2)))
        with pytest.raises(ValueError):
            random_line_triples(C)

    def test_invariants(self):
        C = LccConfig(three_lines().points + three_lines().points[:5])
        for seed in range(10):
            T = random_line_triples(C, seed)
            assert len(T) > 0
            for x, y, z in T:
                P = C.points
                assert len({P[x], P[y], P[z]}) == 3 and collinear(P[x], P[y], P[z])
            assert max(T.pair_counts().values()) <= 6

    def test_seeded(self):
        C = three_lines()
        assert random_line_triples(C, 11).triples == random_line_triples(C, 11).triples


class TestLowRank:
    def test_all_copies(self):
        C = LccConfig(((1, 2),) * 7)
        res = low_rank_sublist(C, Fraction(1, 6), check=False)
        assert res.method == "multiplicity" and res.dimension == 0 and res.indices == tuple(range(7))

    def test_three_coplanar_lines(self):
        C = coplanar_lines()
        res = low_rank_sublist(C, Fraction(1, 6), seed=0)
        assert res.method == "core" and res.dimension <= 2
        sub = [C.points[i] for i in res.indices]
        diffs = [tuple(a - b for a, b in zip(p, sub[0])) for p in sub[1:]]
        assert sympy_rank(diffs) == res.dimension
        assert res.profile.q == 3 and res.profile.k >= res.threshold and res.profile.t <= 6
        assert res.dimension <= len(res.indices) - res.rank_bound

    def test_three_skew_lines(self):
        # symmetric lines share one degree, so the core keeps all of them
        res = low_rank_sublist(three_lines(), Fraction(1, 6), seed=0)
        assert len(res.indices) == 30 and res.dimension == 5

    def test_general_position_rejected(self):
        C = LccConfig(((1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 3, 7)))
        with pytest.raises(LccPreconditionError):
            low_rank_sublist(C, Fraction(1, 4))

    def test_failure_report(self):
        # with no retries there is no family to peel
        with pytest.raises(LowRankFailure) as err:
            low_rank_sublist(on_line(3), Fraction(1, 3), retries=0, check=False)
        assert err.value.stats == []


class TestPartition:
    def test_one_line(self):
        tr = partition_iterate(on_line(8), Fraction(1, 8))
        assert len(tr.steps) == 1 and tr.final_dimension == 1

    def test_three_lines(self):
        C = three_lines()
        tr = partition_iterate(C, Fraction(1, 6), seed=0)
        assert len(tr.steps) <= 3 and tr.final_dimension <= 5
        diffs = [tuple(a - b for a, b in zip(p, C.points[0])) for p in C.points[1:]]
        assert tr.final_dimension == sympy_rank(diffs)

    def test_strict_growth(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            C = random_small_lcc(rng, 12)
            if lcc_audit(C).is_lcc(Fraction(1, 12)) is not True:
                continue
            tr = partition_iterate(C, Fraction(1, 12), seed=1)
            sizes = [s.size for s in tr.steps]
            assert all(b > a for a, b in zip(sizes, sizes[1:])) and sizes[-1] == C.m
            assert len(tr.steps) <= C.m


def test_affine_span_members():
    C = LccConfig(((1, 0), (1, 1), (1, 2), (2, 0)))
    assert affine_span_members(C, [0, 1]) == [0, 1, 2]
    assert affine_span_members(C, [0, 3]) == [0, 3]
