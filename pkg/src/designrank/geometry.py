"""Point configurations, line incidences and the Sylvester-Gallai style audits.

Coordinates are exact rationals by default; complex floating coordinates are
accepted too, in which case collinearity is decided with a relative
tolerance and near-threshold triples raise :class:`CollinearityWarning`.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ._validation import check_count, to_fraction
from .design import DesignProfile, design_profile
from .matrix import COMPLEX, RATIONAL, ScalarMatrix
from .rank import exact_rank_rational, numerical_rank
from .triples import triple_family

__all__ = [
    "PointConfig",
    "LineIncidence",
    "DependencyRow",
    "CollinearityWarning",
    "special_lines",
    "lines_through",
    "sg_delta",
    "dependency_row",
    "build_sg_design_matrix",
    "affine_dimension",
    "generate_lines_config",
    "grid_config",
    "mr_delta",
    "mr3_check",
    "sgk_check",
    "sgk_min_count",
]

COLLINEARITY_TOL = 1e-9
SGK_BUDGET = 10**7


class CollinearityWarning(UserWarning):
    """A floating-point triple is close to, but not within, the collinearity tolerance."""


def _is_exact(x):
    return isinstance(x, (int, Fraction, str, np.integer))


@dataclass(frozen=True)
class PointConfig:
    points: tuple
    colors: Optional[tuple] = None
    distinct_required: bool = True

    def __post_init__(self):
        pts = [tuple(p) for p in self.points]
        if not pts:
            raise ValueError("a configuration needs at least one point")
        d = len(pts[0])
        if d < 1 or any(len(p) != d for p in pts):
            raise ValueError("all points must have the same dimension d >= 1")
        if all(_is_exact(x) for p in pts for x in p):
            pts = tuple(tuple(to_fraction(x) for x in p) for p in pts)
        else:
            pts = tuple(tuple(complex(x) for x in p) for p in pts)
        if self.distinct_required and len(set(pts)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        if self.colors is not None:
            colors = tuple(int(c) for c in self.colors)
            if len(colors) != len(pts):
                raise ValueError("need one color per point")
            if any(c not in (1, 2, 3) for c in colors):
                raise ValueError("colors must be in {1, 2, 3}")
            object.__setattr__(self, "colors", colors)

    @property
    def n(self):
        return len(self.points)

    @property
    def d(self):
        return len(self.points[0])

    @property
    def exact(self):
        return isinstance(self.points[0][0], Fraction)

    @property
    def domain(self):
        return RATIONAL if self.exact else COMPLEX

    def array(self):
        return np.array(self.points, dtype=object if self.exact else complex)


@dataclass(frozen=True)
class LineIncidence:
    line_id: int
    members: tuple


@dataclass(frozen=True)
class DependencyRow:
    """``alpha*v_i + beta*v_j + gamma*v_k == 0`` with ``alpha + beta + gamma == 0``."""

    indices: Optional[tuple]
    coefficients: tuple


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _direction_key(v):
    """Canonical representative of the 1-dimensional subspace spanned by ``v``."""
    for x in v:
        if x != 0:
            return tuple(y / x for y in v)
    return None


def _sine(a, b):
    na = math.sqrt(sum(abs(x) ** 2 for x in a))
    nb = math.sqrt(sum(abs(x) ** 2 for x in b))
    if na == 0 or nb == 0:
        return 0.0
    # residual of b after projecting on a; the squared-norm identity cancels badly near zero
    c = sum(x.conjugate() * y for x, y in zip(a, b)) / na**2
    return math.sqrt(sum(abs(y - c * x) ** 2 for x, y in zip(a, b))) / nb


def lines_through(C, i, tol=COLLINEARITY_TOL):
    """Group the other points by the line they span with point ``i``.

    Returns a list of sorted index tuples, one per line through ``i``.
    """
    P = C.points
    if C.exact:
        groups = {}
        for j in range(C.n):
            if j != i:
                groups.setdefault(_direction_key(_sub(P[j], P[i])), []).append(j)
        return sorted(tuple(g) for g in groups.values())
    reps = []
    ambiguous = False
    for j in range(C.n):
        if j == i:
            continue
        b = _sub(P[j], P[i])
        for g in reps:
            s = _sine(_sub(P[g[0]], P[i]), b)
            if s <= tol:
                g.append(j)
                break
            if s < 10 * tol:
                ambiguous = True
        else:
            reps.append([j])
    if ambiguous:
        warnings.warn(f"near-collinear triple through point {i} within (tol, 10*tol)", CollinearityWarning,
                      stacklevel=2)
    return sorted(tuple(g) for g in reps)


def special_lines(C, tol=COLLINEARITY_TOL):
    """Every line through at least three points, each listed once."""
    seen = set()
    for i in range(C.n):
        for g in lines_through(C, i, tol):
            if len(g) >= 2:
                seen.add(tuple(sorted((i,) + g)))
    return [LineIncidence(k, members) for k, members in enumerate(sorted(seen))]


def _covered_counts(C, include_self=True, tol=COLLINEARITY_TOL):
    counts = []
    for i in range(C.n):
        on = [g for g in lines_through(C, i, tol) if len(g) >= 2]
        covered = sum(len(g) for g in on)
        if on and include_self:
            covered += 1
        counts.append(covered)
    return counts


def sg_delta(C, include_self=True, tol=COLLINEARITY_TOL):
    """Largest ``delta`` for which ``C`` is a delta-SG configuration.

    For each point, count the points covered by the special lines through it
    (the point itself included when it lies on one) and divide by ``n``.
    """
    return Fraction(min(_covered_counts(C, include_self, tol)), C.n)


def dependency_row(vi, vj, vk, indices=None, tol=COLLINEARITY_TOL):
    """Affine dependency of three distinct collinear points.

    Writing ``v_k = (1 - s) v_i + s v_j`` the coefficients are
    ``(1 - s, s, -1)``.
    """
    vi, vj, vk = tuple(vi), tuple(vj), tuple(vk)
    exact = all(_is_exact(x) for x in vi + vj + vk)
    if exact:
        vi, vj, vk = (tuple(to_fraction(x) for x in v) for v in (vi, vj, vk))
    if len({vi, vj, vk}) != 3:
        raise ValueError("dependency rows need three distinct points")
    a = _sub(vj, vi)
    b = _sub(vk, vi)
    c = max(range(len(a)), key=lambda t: abs(a[t]))
    s = b[c] / a[c]
    if exact:
        if any(b[t] != s * a[t] for t in range(len(a))):
            raise ValueError("points are not collinear")
        coeffs = (1 - s, s, Fraction(-1))
    else:
        if _sine(a, b) > tol:
            raise ValueError("points are not collinear within tolerance")
        coeffs = (1 - s, s, -1.0 + 0j)
    return DependencyRow(indices, coeffs)


def build_sg_design_matrix(C, tol=COLLINEARITY_TOL):
    """Design matrix ``A`` with ``A @ V == 0`` built from collinear triples.

    Each special line with ``r`` points (identified with ``0..r-1`` by
    increasing point index) contributes the ``r^2 - r`` triples of
    :func:`~designrank.triples.triple_family`, one dependency row each.
    """
    lines = special_lines(C, tol)
    on_line = {i for ln in lines for i in ln.members}
    missing = [i for i in range(C.n) if i not in on_line]
    if missing:
        raise ValueError(f"points {missing[:5]} lie on no special line")
    rows = []
    for ln in lines:
        mem = ln.members
        for a, b, c in triple_family(len(mem)):
            idx = (mem[a], mem[b], mem[c])
            dep = dependency_row(*(C.points[t] for t in idx), indices=idx, tol=tol)
            row = [0] * C.n
            for t, coef in zip(idx, dep.coefficients):
                row[t] = coef
            rows.append(row)
    A = ScalarMatrix(np.array(rows, dtype=object if C.exact else complex), C.domain)
    return A, design_profile(A)


def _difference_matrix(C):
    base = C.points[0]
    return [_sub(p, base) for p in C.points[1:]]


def affine_dimension(C, tol_factor=1.0):
    """Dimension of the affine hull (exact for rational coordinates)."""
    if C.n == 1:
        return 0
    D = _difference_matrix(C)
    if C.exact:
        return exact_rank_rational(ScalarMatrix(np.array(D, dtype=object), RATIONAL)).value
    return numerical_rank(np.array(D, dtype=complex), tol_factor).value


def grid_config(size=3):
    """The ``size x size`` integer grid."""
    return PointConfig(tuple((x, y) for x in range(size) for y in range(size)))


def _subspace_lines(num_lines, pts_per_line, d, rng, span):
    # line a lives in coordinates (2a, 2a+1): base e_{2a}, direction e_{2a+1}
    pts = []
    for a in range(num_lines):
        scale = int(rng.integers(1, span + 1))
        params = rng.choice(np.arange(-span, span + 1), size=pts_per_line, replace=False)
        for s in params:
            v = [Fraction(0)] * d
            v[2 * a] = Fraction(1)
            v[2 * a + 1] = Fraction(int(s) * scale)
            pts.append(tuple(v))
    return pts


def _random_lines(num_lines, pts_per_line, d, rng, span):
    pts = []
    for _ in range(num_lines):
        base = rng.integers(-span, span + 1, size=d)
        direction = rng.integers(-span, span + 1, size=d)
        if not direction.any():
            direction[0] = 1
        params = rng.choice(np.arange(-span, span + 1), size=pts_per_line, replace=False)
        pts.extend(tuple(Fraction(int(b + s * u)) for b, u in zip(base, direction)) for s in params)
    return pts


def generate_lines_config(num_lines, pts_per_line, d, seed=0, max_attempts=200):
    """Points spread evenly over ``num_lines`` lines in ``Q^d``.

    With ``d >= 2 * num_lines`` line ``a`` sits in coordinates ``2a, 2a+1``, so
    the lines are pairwise skew and the affine dimension is
    ``2 * num_lines - 1``. Smaller ``d`` draws random integer lines. Either
    way a draw is kept only if its special lines are exactly the intended
    ones, which makes ``sg_delta == 1 / num_lines``.
    """
    num_lines = check_count(num_lines, "num_lines", 1)
    pts_per_line = check_count(pts_per_line, "pts_per_line", 3)
    d = check_count(d, "d", 1)
    if d < num_lines:
        raise ValueError(f"need d >= num_lines, got d={d}, num_lines={num_lines}")
    if d == 1 and num_lines > 1:
        raise ValueError("in dimension 1 all points share one line")
    rng = np.random.default_rng(seed)
    span = 4 + pts_per_line
    draw = _subspace_lines if d >= 2 * num_lines else _random_lines
    target = [tuple(range(a * pts_per_line, (a + 1) * pts_per_line)) for a in range(num_lines)]
    for _ in range(max_attempts):
        pts = draw(num_lines, pts_per_line, d, rng, span)
        if len(set(pts)) != len(pts):
            continue
        C = PointConfig(tuple(pts))
        if [ln.members for ln in special_lines(C)] == target:
            return C
    raise RuntimeError(f"no admissible configuration after {max_attempts} attempts")


def _color_classes(C, allowed):
    if C.colors is None:
        raise ValueError("configuration has no colors")
    present = set(C.colors)
    if not present <= set(allowed):
        raise ValueError(f"colors must lie in {sorted(allowed)}, got {sorted(present)}")
    return present


def mr_delta(C, include_self=True, tol=COLLINEARITY_TOL):
    """Largest ``delta`` for which a 2-colored configuration is delta-MR.

    For a point ``p`` of color ``c``, count the color-``c`` points on the
    bi-chromatic lines through ``p`` (``p`` included when such a line exists)
    and divide by the size of color class ``c``.
    """
    present = _color_classes(C, (1, 2))
    if present != {1, 2}:
        raise ValueError("both color classes must be nonempty")
    size = {c: C.colors.count(c) for c in (1, 2)}
    best = None
    for i in range(C.n):
        c = C.colors[i]
        covered = 0
        any_line = False
        for g in lines_through(C, i, tol):
            cols = {C.colors[j] for j in g}
            if cols != {c}:
                any_line = True
                covered += sum(1 for j in g if C.colors[j] == c)
        if any_line and include_self:
            covered += 1
        val = Fraction(covered, size[c])
        best = val if best is None else min(best, val)
    return best


def mr3_check(C, tol=COLLINEARITY_TOL):
    """True iff no line through two or more points is monochromatic."""
    _color_classes(C, (1, 2, 3))
    for i in range(C.n):
        for g in lines_through(C, i, tol):
            if all(C.colors[j] == C.colors[i] for j in g):
                return False
    return True


def _rref(rows):
    """Reduced row echelon form of rational row vectors; returns (rows, pivots)."""
    R = [list(r) for r in rows]
    pivots = []
    lead = 0
    ncols = len(R[0]) if R else 0
    for r in range(len(R)):
        while lead < ncols:
            piv = next((i for i in range(r, len(R)) if R[i][lead] != 0), None)
            if piv is not None:
                break
            lead += 1
        else:
            break
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][lead]
        R[r] = [x * inv for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][lead] != 0:
                f = R[i][lead]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(lead)
        lead += 1
    return R[: len(pivots)], pivots


def _residual(w, basis, pivots):
    w = list(w)
    for row, p in zip(basis, pivots):
        f = w[p]
        if f != 0:
            w = [x - f * y for x, y in zip(w, row)]
    return tuple(w)


def sgk_min_count(C, k, star=False, budget=SGK_BUDGET):
    """Minimum, over independent k-tuples, of the number of qualifying points.

    Returns ``None`` when there is no independent k-tuple.
    """
    if not C.exact:
        raise ValueError("k-flat checks need exact rational coordinates")
    k = check_count(k, "k", 1)
    total = math.comb(C.n, k)
    if total > budget:
        raise ValueError(f"{total} {k}-tuples of {C.n} points exceed the enumeration budget {budget}")
    P = C.points
    best = None
    for tup in itertools.combinations(range(C.n), k):
        base = P[tup[0]]
        dirs = [_sub(P[j], base) for j in tup[1:]]
        basis, pivots = _rref(dirs) if dirs else ([], [])
        if len(pivots) != k - 1:
            continue
        inside = 0
        groups = {}
        for u in range(C.n):
            r = _residual(_sub(P[u], base), basis, pivots)
            key = _direction_key(r)
            if key is None:
                inside += 1
            else:
                groups[key] = groups.get(key, 0) + 1
        count = inside
        for size in groups.values():
            if star:
                ok = size >= 2
            else:
                ok = inside + size > k + 1
            if ok:
                count += size
        best = count if best is None else min(best, count)
    return best


def sgk_check(C, k, delta, star=False, budget=SGK_BUDGET):
    """Brute-force delta-SG_k (``star=False``) or delta-SG_k* (``star=True``) test.

    For every independent k-tuple, count points ``u`` that lie in its flat or
    whose k-flat with the tuple qualifies; the configuration passes when
    every tuple reaches ``ceil(delta * n)``.
    """
    need = math.ceil(Fraction(delta) * C.n)
    low = sgk_min_count(C, k, star, budget)
    return True if low is None else low >= need
