"""Ultrametric spaces: validation, center families at dyadic scales,
scale-indexed retractions of subset spaces, and the subdominant ultrametric
with its disconnection constant.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .metric import (FSet, FiniteMetricSpace, _resolve_tol, _ordered_points,
                     as_finite_space)


class LevelRangeError(ValueError):
    """The center family's level range cannot resolve the request."""


@dataclass(frozen=True)
class UltraCheckReport:
    """Outcome of the strong-triangle check over all point triples."""

    is_ultrametric: bool
    violation: float
    worst_triple: tuple | None


def validate_ultrametric(space, tol=None):
    """Exhaustively check d(x, y) <= max(d(x, z), d(z, y)) on all triples.

    Reports the worst signed slack; the space passes when the slack is within
    tolerance.
    """
    tol = _resolve_tol(tol)
    space = as_finite_space(space, validate=False)
    D = space.dist
    n = len(space.points)
    if n < 3:
        return UltraCheckReport(True, 0.0, None)
    worst = -math.inf
    arg = None
    for z in range(n):
        cover = np.maximum(D[:, z][:, None], D[z, :][None, :])
        slack = D - cover
        peak = float(slack.max())
        if peak > worst:
            i, j = np.unravel_index(int(np.argmax(slack)), slack.shape)
            worst = peak
            arg = (space.points[i], space.points[j], space.points[z])
    return UltraCheckReport(worst <= tol, worst, arg)


@dataclass(frozen=True, eq=False)
class CenterFamily:
    """Per-scale center maps: at level k, tau sends each point to the
    representative of its open ball of radius ``base ** k``."""

    levels: tuple
    maps: dict
    lipschitz: float = 1.0
    base: float = 0.5

    def scale(self, k):
        return self.base ** k

    def tau(self, k, p):
        return self.maps[k][p]

    def tau_set(self, k, A):
        return FSet(self.maps[k][p] for p in A)


def _auto_levels(space):
    diam = space.diameter()
    if diam == 0:
        return range(0, 1)
    dmin = space.min_positive_distance()
    k_low = math.floor(-math.log2(diam)) - 1
    k_high = math.ceil(-math.log2(dmin)) + 1
    return range(k_low, k_high + 1)


def build_centers(space, levels=None, tol=None):
    """Greedy center family of an ultrametric space at dyadic scales.

    Points are scanned in sorted order per level; a point becomes a center
    unless an existing center already covers it at that scale.  The default
    level range runs from one step above the diameter down to one step below
    the least positive distance, so the coarsest map collapses everything and
    the finest is injective.  The family's contraction, displacement, and
    separation properties are verified exhaustively before returning.
    """
    report = validate_ultrametric(space, tol)
    if not report.is_ultrametric:
        raise ValueError("space is not ultrametric; worst triple %r fails by %.3g"
                         % (report.worst_triple, report.violation))
    if levels is None:
        levels = _auto_levels(space)
    levels = tuple(sorted(levels))
    if not levels:
        raise ValueError("at least one level is required")
    order = _ordered_points(space)
    maps = {}
    for k in levels:
        scale = 0.5 ** k
        centers = []
        assignment = {}
        for p in order:
            for c in centers:
                if space.d(p, c) < scale:
                    assignment[p] = c
                    break
            else:
                centers.append(p)
                assignment[p] = p
        maps[k] = assignment
    family = CenterFamily(levels, maps)
    verify_center_family(space, family, tol)
    return family


def verify_center_family(space, family, tol=None):
    """Check the three center-map properties at every level; raises on failure.

    At level k with scale s = base**k: each point moves by at most L*s,
    distinct centers are at least s/L apart, and the map contracts distances
    up to the factor L.
    """
    tol = _resolve_tol(tol)
    L = family.lipschitz
    pts = list(space.points)
    for k in family.levels:
        s = family.scale(k)
        m = family.maps[k]
        for p in pts:
            if space.d(p, m[p]) > L * s + tol:
                raise ValueError("level %d: point %r displaced beyond %g" % (k, p, L * s))
        for p, q in itertools.combinations(pts, 2):
            cp, cq = m[p], m[q]
            if cp != cq and space.d(cp, cq) < s / L - tol:
                raise ValueError("level %d: centers %r, %r too close" % (k, cp, cq))
            if space.d(cp, cq) > L * space.d(p, q) + tol:
                raise ValueError("level %d: map expands pair %r, %r" % (k, p, q))


def generic_retract(family, A, n, m):
    """Collapse A to at most m points using the coarsest level that works.

    Given n > m >= 1 and |A| <= n, picks the largest level k whose center map
    sends A to at most m points and applies it.  Sets with at most m points
    are fixed.  Raises LevelRangeError when the family's levels cannot
    certify the choice.
    """
    if not n > m >= 1:
        raise ValueError("need n > m >= 1, got n=%d m=%d" % (n, m))
    pts = tuple(A)
    if len(pts) > n:
        raise ValueError("set has %d points, more than n=%d" % (len(pts), n))
    if len(pts) <= m:
        return A if isinstance(A, FSet) else FSet(pts)
    top = family.levels[-1]
    for k in reversed(family.levels):
        img = family.tau_set(k, pts)
        if len(img) <= m:
            if k == top:
                raise LevelRangeError(
                    "level range is truncated above; cannot certify the maximal level")
            return img
    raise LevelRangeError("no level in range collapses the set to %d points" % m)


def generic_retract_bound(lipschitz=1.0, base=0.5):
    """Lipschitz bound of generic_retract for a family with the given
    contraction constant and scale base: 2 L^3 / b + 1."""
    return 2.0 * lipschitz ** 3 / base + 1.0


def snowflake_exponent(target_l):
    """Smallest integer a with 5 ** (1/a) <= target_l (target_l > 1)."""
    if target_l <= 1:
        raise ValueError("target constant must exceed 1")
    a = max(1, math.ceil(math.log(5) / math.log(target_l) - 1e-12))
    while 5.0 ** (1.0 / a) > target_l * (1 + 1e-12):
        a += 1
    return a


@dataclass(frozen=True, eq=False)
class SnowflakePlan:
    """Prebuilt data for snowflake_retract: the powered metric, its centers,
    and the resulting constant bound 5 ** (1/alpha) <= target."""

    alpha: int
    space: FiniteMetricSpace
    powered: FiniteMetricSpace
    family: CenterFamily
    constant_bound: float


def build_snowflake_plan(space, target_l, tol=None):
    alpha = snowflake_exponent(target_l)
    powered = FiniteMetricSpace(space.points, space.dist ** alpha, tol=tol)
    family = build_centers(powered, tol=tol)
    return SnowflakePlan(alpha, space, powered, family, 5.0 ** (1.0 / alpha))


def snowflake_retract(space, A, n, m, target_l, plan=None, tol=None):
    """Retraction of an ultrametric subset space with constant <= target_l.

    Raising the metric to an integer power keeps it ultrametric while taking
    the generic constant 5 to 5 ** (1/alpha); pass a prebuilt plan when
    retracting many sets over the same space.
    """
    if plan is None:
        plan = build_snowflake_plan(space, target_l, tol=tol)
    return generic_retract(plan.family, A, n, m)


def subdominant_ultrametric(space, validate=True):
    """Largest ultrametric below the metric: the minimax chain distance,
    realized by single-linkage merging."""
    space = as_finite_space(space, validate=False)
    n = len(space.points)
    rho = np.zeros((n, n))
    parent = list(range(n))
    members = {i: [i] for i in range(n)}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    edges = sorted((space.dist[i, j], i, j)
                   for i in range(n) for j in range(i + 1, n))
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        for u in members[ri]:
            for v in members[rj]:
                rho[u, v] = rho[v, u] = w
        members[ri].extend(members.pop(rj))
        parent[rj] = ri
    return FiniteMetricSpace(space.points, rho, validate=validate)


@dataclass(frozen=True)
class DisconnectionReport:
    """The least ratio of chain distance to direct distance, with the pair
    attaining it and a chain realizing the minimax value."""

    constant: float
    witness: tuple | None
    chain: tuple


def disconnection_constant(space, validate=True):
    """Least over point pairs of subdominant distance over distance.

    The constant lies in (0, 1], equals 1 exactly on ultrametric spaces, and
    the returned chain walks from one witness point to the other with every
    step at most ``constant * d(witness)``.
    """
    space = as_finite_space(space, validate=False)
    n = len(space.points)
    if n < 2:
        return DisconnectionReport(1.0, None, tuple(space.points))
    rho = subdominant_ultrametric(space, validate=validate).dist
    D = space.dist
    off = ~np.eye(n, dtype=bool)
    ratios = np.where(off, rho / np.where(off, D, 1.0), np.inf)
    i, j = np.unravel_index(int(np.argmin(ratios)), ratios.shape)
    c = float(ratios[i, j])
    bottleneck = rho[i, j]
    adj = (D <= bottleneck) & off
    prev = {i: None}
    queue = deque([i])
    while queue:
        u = queue.popleft()
        if u == j:
            break
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if j not in prev:
        raise RuntimeError("no chain realizes the subdominant distance")
    path = []
    u = j
    while u is not None:
        path.append(space.points[u])
        u = prev[u]
    path.reverse()
    return DisconnectionReport(c, (space.points[i], space.points[j]), tuple(path))
