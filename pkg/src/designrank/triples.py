"""Idempotent latin squares, the triple families built from them, and
min-degree cores of 3-uniform hypergraphs."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import lru_cache

from ._validation import check_count

__all__ = [
    "LatinSquare",
    "TripleFamily",
    "Hypergraph3",
    "diagonal_latin_square",
    "triple_family",
    "hypergraph_core",
]


@dataclass(frozen=True)
class LatinSquare:
    """An ``r x r`` latin square on labels ``0..r-1`` with ``cells[i][i] == i``."""

    r: int
    cells: tuple

    def __post_init__(self):
        full = set(range(self.r))
        if len(self.cells) != self.r:
            raise ValueError("wrong number of rows")
        for i, row in enumerate(self.cells):
            if set(row) != full or len(row) != self.r:
                raise ValueError(f"row {i} is not a permutation of 0..{self.r - 1}")
            if row[i] != i:
                raise ValueError(f"diagonal cell ({i}, {i}) is {row[i]}, expected {i}")
        for j in range(self.r):
            if {row[j] for row in self.cells} != full:
                raise ValueError(f"column {j} is not a permutation of 0..{self.r - 1}")

    def __getitem__(self, ij):
        i, j = ij
        return self.cells[i][j]


@dataclass(frozen=True)
class TripleFamily:
    """Ordered index triples over the ground set ``0..r-1``."""

    r: int
    triples: tuple

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def element_counts(self):
        counts = Counter()
        for t in self.triples:
            counts.update(set(t))
        return counts

    def pair_counts(self):
        counts = Counter()
        for a, b, c in self.triples:
            for pair in ((a, b), (a, c), (b, c)):
                counts[frozenset(pair)] += 1
        return counts


@dataclass(frozen=True)
class Hypergraph3:
    """3-uniform (multi-)hypergraph on vertices ``0..m-1``."""

    m: int
    edges: tuple

    def __post_init__(self):
        edges = tuple(tuple(e) for e in self.edges)
        for e in edges:
            if len(e) != 3 or len(set(e)) != 3:
                raise ValueError(f"edge {e} does not have three distinct vertices")
            if any(v < 0 or v >= self.m for v in e):
                raise ValueError(f"edge {e} has a vertex outside 0..{self.m - 1}")
        object.__setattr__(self, "edges", edges)


@lru_cache(maxsize=None)
def _square_cells(r):
    if r == 1:
        return ((0,),)
    if r % 2 == 1:
        half = pow(2, -1, r)
        return tuple(tuple((i + j) * half % r for j in range(r)) for i in range(r))
    # Even order: prolong the odd square of order r-1 along the transversal
    # {(i, i+1)}, which misses the diagonal, placing the new label r-1 there.
    s = r - 1
    base = [list(row) + [None] for row in _square_cells(s)]
    last = [None] * r
    for i in range(s):
        j = (i + 1) % s
        moved = base[i][j]
        base[i][j] = s
        base[i][s] = moved
        last[j] = moved
    last[s] = s
    return tuple(tuple(row) for row in base) + (tuple(last),)


def diagonal_latin_square(r):
    """Deterministic latin square of order ``r`` with ``D[i][i] == i``.

    Odd orders use ``D[i][j] = (i + j) / 2 mod r``; even orders ``r >= 4``
    extend the odd square of order ``r - 1`` by one row and column. No such
    square exists for ``r == 2``.
    """
    r = check_count(r, "r", 1)
    if r == 2:
        raise ValueError("no 2x2 latin square has diagonal (0, 1)")
    return LatinSquare(r, _square_cells(r))


def triple_family(r):
    """All ``(i, j, D[i][j])`` with ``i != j``, in lexicographic ``(i, j)`` order.

    ``r*r - r`` triples of distinct elements; every element lies in exactly
    ``3(r-1)`` of them and every pair in at most 6.
    """
    r = check_count(r, "r")
    if r < 3:
        raise ValueError(f"triple families need r >= 3, got {r}")
    cells = _square_cells(r)
    return TripleFamily(r, tuple((i, j, cells[i][j]) for i in range(r) for j in range(r) if i != j))


def hypergraph_core(H, threshold):
    """Largest vertex set whose induced sub-hypergraph has minimum degree >= ``threshold``.

    Repeatedly deletes a vertex of degree below the threshold together with
    its edges. The survivor set does not depend on the deletion order.
    """
    degree = [0] * H.m
    incident = [[] for _ in range(H.m)]
    for k, e in enumerate(H.edges):
        for v in e:
            degree[v] += 1
            incident[v].append(k)
    alive_edge = [True] * len(H.edges)
    removed = [False] * H.m
    queue = deque(v for v in range(H.m) if degree[v] < threshold)
    while queue:
        v = queue.popleft()
        if removed[v]:
            continue
        removed[v] = True
        for k in incident[v]:
            if not alive_edge[k]:
                continue
            alive_edge[k] = False
            for u in H.edges[k]:
                if u != v:
                    degree[u] -= 1
                    if degree[u] < threshold and not removed[u]:
                        queue.append(u)
    return frozenset(v for v in range(H.m) if not removed[v])
