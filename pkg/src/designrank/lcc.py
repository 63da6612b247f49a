"""Locally-correctable point lists: recovery graphs, the exact audit of the
erasure quantifier, random per-line triple families and the iterative
low-dimension decomposition.

Points are exact rational vectors, and collinearity and spans are affine.
That matches the linear notions once every vector has first coordinate 1,
which :func:`normalize_generating_set` arranges.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import networkx as nx
import numpy as np

from ._validation import check_count, to_fraction
from .design import DesignProfile, design_profile, rank_lower_bound
from .geometry import PointConfig, _direction_key, _residual, _rref, _sub, dependency_row, special_lines
from .matrix import RATIONAL, ScalarMatrix
from .rank import exact_rank_rational
from .triples import Hypergraph3, TripleFamily, hypergraph_core, triple_family

__all__ = [
    "LccConfig",
    "RecoveryGraph",
    "LccAudit",
    "LowRankSublist",
    "PartitionStep",
    "PartitionTrace",
    "LccPreconditionError",
    "LowRankFailure",
    "normalize_generating_set",
    "recovery_graph",
    "min_vertex_cover",
    "lcc_audit",
    "random_line_triples",
    "low_rank_sublist",
    "partition_iterate",
    "affine_span_members",
]

EXACT_COVER_LIMIT = 24
DEFAULT_RETRIES = 64


class LccPreconditionError(ValueError):
    """The configuration is not certified for the requested delta."""


class LowRankFailure(RuntimeError):
    def __init__(self, message, stats):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class LccConfig:
    """A list of nonzero rational points; repeated entries are copies."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(to_fraction(x) for x in p) for p in self.points)
        if not pts:
            raise ValueError("an LCC configuration needs at least one point")
        d = len(pts[0])
        if d < 1 or any(len(p) != d for p in pts):
            raise ValueError("all points must have the same dimension d >= 1")
        zero = [i for i, p in enumerate(pts) if not any(p)]
        if zero:
            raise ValueError(f"point {zero[0]} is the zero vector")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_multiplicities(cls, points, mults):
        if len(points) != len(mults):
            raise ValueError("need one multiplicity per point")
        out = []
        for p, k in zip(points, mults):
            out.extend([tuple(p)] * check_count(k, "multiplicity", 1))
        return cls(tuple(out))

    @property
    def m(self):
        return len(self.points)

    @property
    def d(self):
        return len(self.points[0])

    def multiplicities(self):
        return Counter(self.points)

    def distinct(self):
        """Distinct points in order of first appearance."""
        return tuple(dict.fromkeys(self.points))

    def sublist(self, indices):
        return LccConfig(tuple(self.points[i] for i in indices))


@dataclass(frozen=True)
class RecoveryGraph:
    target: int
    m: int
    edges: frozenset

    def as_networkx(self):
        G = nx.Graph()
        G.add_nodes_from(v for v in range(self.m) if v != self.target)
        G.add_edges_from(tuple(e) for e in self.edges)
        return G


def normalize_generating_set(vectors, seed=0, attempts=100):
    """Map nonzero vectors so every first coordinate is 1.

    A functional ``f`` nonzero on all vectors is searched for (coordinate
    functionals first, then random small integer ones). ``f`` replaces one
    coordinate to give an invertible map, and each image is divided by its
    ``f`` value. Linear dependencies among the inputs become affine ones.
    """
    vecs = [tuple(to_fraction(x) for x in v) for v in vectors]
    if not vecs:
        raise ValueError("need at least one vector")
    d = len(vecs[0])
    if any(len(v) != d for v in vecs):
        raise ValueError("vectors must share one dimension")
    if any(not any(v) for v in vecs):
        raise ValueError("the zero vector cannot be normalized")
    rng = np.random.default_rng(seed)
    candidates = [tuple(int(a == b) for b in range(d)) for a in range(d)]
    candidates += [tuple(int(x) for x in rng.integers(-9, 10, size=d)) for _ in range(attempts)]
    for f in candidates:
        vals = [sum(a * x for a, x in zip(f, v)) for v in vecs]
        if all(vals):
            break
    else:
        raise ValueError(f"no functional nonzero on all vectors found in {attempts} attempts")
    p = next(i for i, a in enumerate(f) if a)
    others = [i for i in range(d) if i != p]
    out = []
    for v, val in zip(vecs, vals):
        out.append((Fraction(1),) + tuple(v[i] / val for i in others))
    return LccConfig(tuple(out))


def _line_groups(distinct, i):
    """Other distinct points grouped by the line they span with ``distinct[i]``."""
    groups = {}
    for j, q in enumerate(distinct):
        if j != i:
            groups.setdefault(_direction_key(_sub(q, distinct[i])), []).append(j)
    return list(groups.values())


def recovery_graph(C, i):
    """Pairs ``{j, k}`` (both different from ``i``) that recover point ``i``.

    A pair qualifies when one of its points is a copy of ``v_i``, or when
    ``v_i, v_j, v_k`` are three distinct collinear points.
    """
    P = C.points
    if not 0 <= i < C.m:
        raise IndexError(f"index {i} outside 0..{C.m - 1}")
    vi = P[i]
    copies = [j for j in range(C.m) if j != i and P[j] == vi]
    others = [j for j in range(C.m) if j != i]
    edges = set()
    for j in copies:
        edges.update(frozenset((j, k)) for k in others if k != j)
    by_line = {}
    for j in others:
        if P[j] != vi:
            by_line.setdefault(_direction_key(_sub(P[j], vi)), []).append(j)
    for members in by_line.values():
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                j, k = members[a], members[b]
                if P[j] != P[k]:
                    edges.add(frozenset((j, k)))
    return RecoveryGraph(i, C.m, frozenset(edges))


def _cover_branch(nbr, alive, cur, chosen, best):
    while True:
        deg1 = None
        top, top_deg = -1, 0
        a = alive
        while a:
            v = (a & -a).bit_length() - 1
            a &= a - 1
            dv = bin(nbr[v] & alive).count("1")
            if dv == 1 and deg1 is None:
                deg1 = v
            if dv > top_deg:
                top, top_deg = v, dv
        if top_deg == 0:
            if cur < best[0]:
                best[0], best[1] = cur, list(chosen)
            return
        if deg1 is None:
            break
        w = (nbr[deg1] & alive).bit_length() - 1
        alive &= ~(1 << w)
        chosen = chosen + [w]
        cur += 1
    # greedy maximal matching gives a lower bound on what is left
    lb, a = 0, alive
    while a:
        v = (a & -a).bit_length() - 1
        a &= ~(1 << v)
        free = nbr[v] & a
        if free:
            u = (free & -free).bit_length() - 1
            a &= ~(1 << u)
            lb += 1
    if cur + lb >= best[0]:
        return
    _cover_branch(nbr, alive & ~(1 << top), cur + 1, chosen + [top], best)
    N = nbr[top] & alive
    if cur + bin(N).count("1") < best[0]:
        taken = [u for u in range(len(nbr)) if N >> u & 1]
        _cover_branch(nbr, alive & ~N & ~(1 << top), cur + len(taken), chosen + taken, best)


def min_vertex_cover(G, exact_limit=EXACT_COVER_LIMIT):
    """Vertex cover of a networkx graph; returns ``(cover, is_exact)``.

    Isolated vertices are dropped and degree-1 vertices force their
    neighbour. If at most ``exact_limit`` vertices remain the cover is
    minimum (branch and bound); otherwise it is the endpoint set of a
    maximum matching of the remainder, at most twice the minimum.
    """
    H = G.copy()
    forced = set()
    while True:
        H.remove_nodes_from([v for v in list(H) if H.degree(v) == 0])
        leaf = next((v for v in H if H.degree(v) == 1), None)
        if leaf is None:
            break
        w = next(iter(H[leaf]))
        forced.add(w)
        H.remove_node(w)
    matching = nx.max_weight_matching(H, maxcardinality=True)
    approx = {v for e in matching for v in e}
    if H.number_of_nodes() > exact_limit:
        return frozenset(forced | approx), False
    nodes = list(H)
    pos = {v: t for t, v in enumerate(nodes)}
    nbr = [sum(1 << pos[u] for u in H[v]) for v in nodes]
    best = [len(approx), [pos[v] for v in approx]]
    _cover_branch(nbr, (1 << len(nodes)) - 1, 0, [], best)
    return frozenset(forced | {nodes[t] for t in best[1]}), True


@dataclass(frozen=True)
class LccAudit:
    """Per-index matching sizes and vertex covers of the recovery graphs.

    The configuration survives every erasure set of size ``s`` iff
    ``s < tau_i`` for all ``i``. ``mu_i <= tau_i`` gives the certificate,
    and a cover of size ``<= s`` is an explicit killing set.
    """

    m: int
    mu: tuple
    tau: tuple
    tau_exact: tuple
    covers: tuple = field(repr=False)
    delta_guaranteed: Fraction = Fraction(0)
    delta_refuted: Fraction = Fraction(0)

    @property
    def exact(self):
        return all(self.tau_exact)

    def is_lcc(self, delta):
        """True (certified), False (refuted) or None (undecided) for this delta."""
        s = math.floor(Fraction(delta) * self.m)
        if s < min(self.mu):
            return True
        if s >= min(self.tau):
            return False
        if self.exact:
            return True
        return None

    def killing_set(self, delta):
        """``(i, Delta)`` with ``|Delta| <= delta*m`` leaving index ``i`` unrecoverable, or None."""
        s = math.floor(Fraction(delta) * self.m)
        i = min(range(self.m), key=lambda t: (self.tau[t], t))
        if self.tau[i] > s:
            return None
        return i, self.covers[i]

    def to_dict(self):
        return {
            "m": self.m,
            "mu_min": min(self.mu),
            "tau_min": min(self.tau),
            "tau_all_exact": self.exact,
            "delta_guaranteed": str(self.delta_guaranteed),
            "delta_refuted": str(self.delta_refuted),
            "mu": " ".join(map(str, self.mu)),
            "tau": " ".join(map(str, self.tau)),
        }


def lcc_audit(C, exact_limit=EXACT_COVER_LIMIT):
    mu, tau, exact, covers = [], [], [], []
    for i in range(C.m):
        G = recovery_graph(C, i).as_networkx()
        mu.append(len(nx.max_weight_matching(G, maxcardinality=True)))
        cover, ok = min_vertex_cover(G, exact_limit)
        covers.append(frozenset(cover))
        tau.append(len(cover))
        exact.append(ok)
    return LccAudit(
        m=C.m, mu=tuple(mu), tau=tuple(tau), tau_exact=tuple(exact), covers=tuple(covers),
        delta_guaranteed=Fraction(min(mu), C.m), delta_refuted=Fraction(min(tau), C.m),
    )


def _lines_with_indices(C):
    """Lines through >= 3 distinct points, as index lists with repetitions."""
    distinct = C.distinct()
    if len(distinct) < 3:
        return []
    lines = special_lines(PointConfig(distinct))
    where = {p: [] for p in distinct}
    for i, p in enumerate(C.points):
        where[p].append(i)
    return [[i for a in ln.members for i in where[distinct[a]]] for ln in lines]


def _draw_triples(C, lines, rng):
    P = C.points
    out = []
    for idx in lines:
        rho = [idx[t] for t in rng.permutation(len(idx))]
        for a, b, c in triple_family(len(idx)):
            x, y, z = rho[a], rho[b], rho[c]
            if len({P[x], P[y], P[z]}) == 3:
                out.append((x, y, z))
    return TripleFamily(C.m, tuple(out))


def random_line_triples(C, seed=0):
    """Union over lines of ``triple_family(r)`` pushed through a random bijection.

    ``r`` counts the indices on the line with repetition; only triples that
    land on three distinct points are kept.
    """
    lines = _lines_with_indices(C)
    if not lines:
        raise ValueError("no line carries three distinct points")
    return _draw_triples(C, lines, np.random.default_rng(seed))


def _affine_dim(points):
    pts = list(dict.fromkeys(points))
    if len(pts) <= 1:
        return 0 if pts else -1
    base = pts[0]
    M = np.array([_sub(p, base) for p in pts[1:]], dtype=object)
    return exact_rank_rational(ScalarMatrix(M, RATIONAL)).value


def affine_span_members(C, basis_indices):
    """Indices of ``C`` lying in the affine span of the given points."""
    pts = list(dict.fromkeys(C.points[i] for i in basis_indices))
    if not pts:
        return []
    base = pts[0]
    B, piv = _rref([_sub(p, base) for p in pts[1:]]) if len(pts) > 1 else ([], [])
    return [i for i, p in enumerate(C.points) if not any(_residual(_sub(p, base), B, piv))]


class LowRankSublist(NamedTuple):
    indices: tuple
    dimension: int
    method: str
    fraction: Fraction
    threshold: Optional[int] = None
    triples: Optional[int] = None
    profile: Optional[DesignProfile] = None
    rank_bound: Optional[float] = None
    seed_used: Optional[int] = None


def _require_certified(C, delta):
    verdict = lcc_audit(C).is_lcc(delta)
    if verdict is not True:
        state = "refuted" if verdict is False else "undecided"
        raise LccPreconditionError(f"configuration is not certified {delta}-LCC ({state})")


def low_rank_sublist(C, delta, seed=0, retries=DEFAULT_RETRIES, check=True):
    """Find a sublist of bounded dimension.

    A point repeated more than ``delta*m/10`` times is returned on its own.
    Otherwise the largest of ``retries`` random triple families is peeled to
    its core at threshold ``ceil(|T| / 2m)`` (smaller families are tried if
    that core is empty). The dependency rows of the surviving triples form a
    design matrix whose rank bound is reported with the exact dimension.
    """
    delta = Fraction(delta)
    if check:
        _require_certified(C, delta)
    m = C.m
    mult = C.multiplicities()
    heavy = [p for p, k in mult.items() if k >= 2 and k > delta * m / 10]
    if heavy:
        p = max(heavy, key=lambda q: (mult[q], -C.points.index(q)))
        idx = tuple(i for i in range(m) if C.points[i] == p)
        return LowRankSublist(idx, 0, "multiplicity", Fraction(len(idx), m))
    lines = _lines_with_indices(C)
    if not lines:
        raise ValueError("no line carries three distinct points")
    families = []
    for s in range(retries):
        T = _draw_triples(C, lines, np.random.default_rng((seed, s)))
        families.append((len(T), -s, T))
    families.sort(key=lambda x: (x[0], x[1]), reverse=True)
    stats = []
    for size, neg_s, T in families:
        threshold = max(1, math.ceil(Fraction(size, 2 * m)))
        core = hypergraph_core(Hypergraph3(m, T.triples), threshold)
        stats.append((size, threshold, len(core)))
        if not core:
            continue
        idx = tuple(sorted(core))
        pos = {v: t for t, v in enumerate(idx)}
        rows = []
        for x, y, z in T.triples:
            if x in core and y in core and z in core:
                dep = dependency_row(C.points[x], C.points[y], C.points[z])
                row = [Fraction(0)] * len(idx)
                for v, coef in zip((x, y, z), dep.coefficients):
                    row[pos[v]] = coef
                rows.append(row)
        A = ScalarMatrix(np.array(rows, dtype=object), RATIONAL)
        prof = design_profile(A)
        if prof.q != 3 or prof.k < threshold or prof.t > 6:
            raise AssertionError(f"core design matrix has profile {prof.as_tuple()}")
        dim = _affine_dim([C.points[i] for i in idx])
        return LowRankSublist(
            idx, dim, "core", Fraction(len(idx), m), threshold, size, prof,
            rank_lower_bound(len(idx), prof.q, prof.k, prof.t), -neg_s,
        )
    raise LowRankFailure(f"all {retries} triple families have empty cores", stats)


class PartitionStep(NamedTuple):
    kind: str
    size: int
    dimension: int
    added: int


class PartitionTrace(NamedTuple):
    steps: tuple
    final_dimension: int
    direct_dimension: int


def partition_iterate(C, delta, seed=0, retries=DEFAULT_RETRIES, check=True):
    """Grow ``U`` from empty to the whole list, keeping ``W`` outside span(U).

    Each step is one of: a point of ``W`` repeated more than ``delta*m/2``
    times; Case I, a point ``w`` with more than ``delta*m/4`` points of ``W``
    on lines joining ``w`` to ``U``; Case II, a low-rank sublist of ``W`` at
    ``delta' = delta*m / (8|W|)``; or, if that sublist search fails, a single
    point of ``W``. Every step replaces ``U`` by its affine span within the
    list, so ``|U|`` strictly increases.
    """
    delta = Fraction(delta)
    if check:
        _require_certified(C, delta)
    m = C.m
    P = C.points
    U = set()
    steps = []
    dim = -1
    while len(U) < m:
        W = [i for i in range(m) if i not in U]
        wvals = Counter(P[i] for i in W)
        uvals = {P[i] for i in U}
        kind, seed_pts = None, None
        heavy = [p for p, k in wvals.items() if k >= 2 and k > delta * m / 2]
        if heavy:
            kind, seed_pts = "multiplicity", [heavy[0]]
        else:
            distinct = list(dict.fromkeys(P))
            for w in dict.fromkeys(P[i] for i in W):
                p1 = 0
                for members in _line_groups(distinct, distinct.index(w)):
                    vals = [distinct[a] for a in members]
                    if any(v in uvals for v in vals):
                        p1 += sum(wvals.get(v, 0) for v in vals)
                if p1 > delta * m / 4:
                    kind, seed_pts = "case-I", [w]
                    break
        if kind is None:
            sub = C.sublist(W)
            try:
                res = low_rank_sublist(sub, delta * m / (8 * len(W)), seed=(seed, len(steps)),
                                       retries=retries, check=False)
                kind, seed_pts = "case-II", [sub.points[t] for t in res.indices]
            except (LowRankFailure, ValueError):
                kind, seed_pts = "fallback", [P[W[0]]]
        basis = [i for i in U] + [i for i in W if P[i] in set(seed_pts)]
        new_U = set(affine_span_members(C, basis))
        if not new_U > U:
            raise RuntimeError(f"step {len(steps)} ({kind}) made no progress")
        new_dim = _affine_dim([P[i] for i in new_U])
        steps.append(PartitionStep(kind, len(new_U), new_dim, len(new_U) - len(U)))
        U, dim = new_U, new_dim
    direct = _affine_dim(list(P))
    if dim != direct:
        raise AssertionError(f"final dimension {dim} differs from direct measurement {direct}")
    return PartitionTrace(tuple(steps), dim, direct)
