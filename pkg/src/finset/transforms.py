"""Metric transforms and constructions: snowflaking and other concave
distance rewrites, rescaling, max-metric products, disjoint unions with a
constant cross-distance, and quasihomogeneous transport of subset maps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .metric import (
    FSet,
    FiniteMetricSpace,
    _resolve_tol,
    enumerate_fsets,
    hausdorff,
)


@dataclass(frozen=True)
class MetricTransform:
    """A nondecreasing rewrite of distances with φ(0) = 0.

    Two forms: ``power`` applies t^alpha, ``table`` interpolates a piecewise
    linear function through given knots (extended linearly past the last
    knot).  ``doubling`` optionally records a claimed constant M with
    φ(2t) ≤ M φ(t); see doubling_ratio for the empirical check.
    """

    kind: str
    alpha: float = 1.0
    table: tuple = ()
    doubling: float | None = None

    def __post_init__(self):
        if self.kind == "power":
            if not self.alpha > 0:
                raise ValueError("power transform needs alpha > 0")
        elif self.kind == "table":
            knots = tuple((float(t), float(v)) for t, v in self.table)
            if len(knots) < 2 or knots[0] != (0.0, 0.0):
                raise ValueError("table must start at (0, 0) with at least one more knot")
            ts = [t for t, _ in knots]
            vs = [v for _, v in knots]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("table abscissae must be strictly increasing")
            if any(b < a for a, b in zip(vs, vs[1:])):
                raise ValueError("table values must be nondecreasing")
            object.__setattr__(self, "table", knots)
        else:
            raise ValueError("unknown transform kind %r" % (self.kind,))

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if self.kind == "power":
            out = np.power(arr, self.alpha)
        else:
            ts = np.array([k[0] for k in self.table])
            vs = np.array([k[1] for k in self.table])
            out = np.interp(arr, ts, vs)
            beyond = arr > ts[-1]
            if beyond.any():
                slope = (vs[-1] - vs[-2]) / (ts[-1] - ts[-2])
                out = np.where(beyond, vs[-1] + slope * (arr - ts[-1]), out)
        return float(out) if np.isscalar(t) else out

    def to_json(self):
        if self.kind == "power":
            return {"kind": "power", "alpha": self.alpha}
        return {"kind": "table", "pairs": [list(k) for k in self.table]}

    @classmethod
    def from_json(cls, data):
        if data.get("kind") == "power":
            return cls("power", alpha=float(data["alpha"]))
        if data.get("kind") == "table":
            return cls("table", table=tuple(tuple(p) for p in data["pairs"]))
        raise ValueError("transform JSON needs kind power or table")


def _as_finite(space):
    if isinstance(space, FiniteMetricSpace):
        return space
    return FiniteMetricSpace.from_coords(getattr(space, "points", space))


def apply_transform(space, transform, tol=None):
    """Rewrite all distances through the transform and revalidate.

    Raises when φ∘d violates the metric axioms on some triple; powers with
    alpha ≤ 1 always pass, and powers above 1 pass on ultrametric spaces.
    """
    space = _as_finite(space)
    return FiniteMetricSpace(space.points, transform(space.dist), tol=tol)


def doubling_ratio(transform, grid):
    """Largest φ(2t)/φ(t) over the positive grid values."""
    worst = 0.0
    for t in grid:
        t = float(t)
        if t <= 0:
            continue
        base = transform(t)
        worst = math.inf if base == 0 else max(worst, transform(2 * t) / base)
    return worst


def transport_constant(transform, L, distances):
    """Least L' with φ(L t) ≤ L' φ(t) over the observed distances.

    A retraction with constant L on the original space has constant at most
    L' after the transform.
    """
    worst = 0.0
    for t in distances:
        t = float(t)
        if t <= 0:
            continue
        base = transform(t)
        worst = math.inf if base == 0 else max(worst, transform(L * t) / base)
    return worst


def rescale(space, eps):
    """Multiply every distance by eps > 0; Lipschitz constants of maps are
    unchanged when both sides are rescaled together."""
    if not eps > 0:
        raise ValueError("scale factor must be positive")
    space = _as_finite(space)
    return FiniteMetricSpace(space.points, space.dist * float(eps), validate=False)


def product_space(space_x, space_y):
    """Max-metric product: points are (x, y) pairs, distance the larger of
    the coordinate distances."""
    X, Y = _as_finite(space_x), _as_finite(space_y)
    points = tuple(itertools.product(X.points, Y.points))
    D = np.maximum(X.dist[:, None, :, None], Y.dist[None, :, None, :])
    n = len(points)
    return FiniteMetricSpace(points, D.reshape(n, n), validate=False)


def disjoint_union(space_x, space_y, cross):
    """Glue two spaces with a constant cross-distance.

    Points are tagged (0, x) and (1, y).  The triangle inequality holds when
    cross is at least half of each diameter; the returned space is fully
    revalidated, so a cross-distance that is too small raises.
    """
    X, Y = _as_finite(space_x), _as_finite(space_y)
    points = tuple((0, p) for p in X.points) + tuple((1, q) for q in Y.points)
    a, b = len(X.points), len(Y.points)
    D = np.full((a + b, a + b), float(cross))
    D[:a, :a] = X.dist
    D[a:, a:] = Y.dist
    return FiniteMetricSpace(points, D)


def induced_subset_map(f, A):
    """Apply a point map elementwise to a subset; must stay injective on A."""
    out = FSet(f(p) for p in A)
    if len(out) != len(A):
        raise ValueError("map is not injective on %r" % (A,))
    return out


def conjugated_map(point_map, inverse_map, set_map):
    """The subset map B ↦ f(r(f⁻¹(B))) induced by conjugating r through f."""
    def apply(B):
        return induced_subset_map(point_map, set_map(induced_subset_map(inverse_map, B)))
    return apply


@dataclass(frozen=True)
class QhModulus:
    """Ratio-distortion modulus η: if d(x1,x2) ≤ t d(x3,x4) upstream then
    d(fx1,fx2) ≤ η(t) d(fx3,fx4) downstream.

    Linear and power forms cover bi-Lipschitz maps (η(t) = L²t) and
    snowflake identities (η(t) = t^alpha); the table form is an empirical
    step function, the running maximum of observed ratio pairs.
    """

    kind: str
    coefficient: float = 1.0
    exponent: float = 1.0
    table: tuple = ()

    @classmethod
    def linear(cls, c):
        return cls("linear", coefficient=float(c))

    @classmethod
    def power(cls, alpha):
        return cls("power", exponent=float(alpha))

    def __call__(self, t):
        if self.kind == "linear":
            return self.coefficient * t
        if self.kind == "power":
            return t ** self.exponent
        ts, etas = self.table
        i = int(np.searchsorted(ts, t, side="right"))
        return 0.0 if i == 0 else etas[i - 1]


def estimate_qh_modulus(f, space_x, space_y):
    """Tabulate the worst downstream ratio per upstream ratio bound.

    Scans every pair of disjoint point pairs (four distinct points), records
    (upstream ratio, downstream ratio), and returns the running-maximum step
    function as a table QhModulus.
    """
    X, Y = _as_finite(space_x), _as_finite(space_y)
    pts = X.points
    if len(pts) < 4:
        raise ValueError("need at least 4 points to form quadruples")
    pairs = list(itertools.combinations(range(len(pts)), 2))
    dx = np.array([X.dist[i, j] for i, j in pairs])
    fidx = [Y.index(f(p)) for p in pts]
    dy = np.array([Y.dist[fidx[i], fidx[j]] for i, j in pairs])
    ii = np.array([i for i, _ in pairs])
    jj = np.array([j for _, j in pairs])
    disjoint = ((ii[:, None] != ii[None, :]) & (ii[:, None] != jj[None, :])
                & (jj[:, None] != ii[None, :]) & (jj[:, None] != jj[None, :]))
    rx = (dx[:, None] / dx[None, :])[disjoint]
    ry = (dy[:, None] / dy[None, :])[disjoint]
    order = np.argsort(rx, kind="stable")
    rx, ry = rx[order], np.maximum.accumulate(ry[order])
    keep = np.r_[rx[1:] != rx[:-1], True]
    return QhModulus("table", table=(tuple(rx[keep]), tuple(ry[keep])))


@dataclass(frozen=True)
class QhCheckReport:
    """Result of checking the quadruple ratio condition on subset spaces."""

    ok: bool
    worst_excess: float
    witness: tuple | None
    quadruples: int


def check_induced_qh(f, space_x, space_y, n, eta, cap=None, tol=None):
    """Check the quadruple condition for the induced map on subsets.

    Enumerates X(n) upstream, pushes each subset through f, and requires
    Δ_Y(B1,B2) ≤ η(t) Δ_Y(B3,B4) whenever Δ_X(A1,A2) ≤ t Δ_X(A3,A4), which
    reduces to the downstream ratio at t = upstream ratio.  Linear moduli
    use the closed form max ratio ≤ c · min ratio over set pairs.
    """
    tol = _resolve_tol(tol)
    X, Y = _as_finite(space_x), _as_finite(space_y)
    sets = tuple(enumerate_fsets(X, n, cap=cap))
    images = [induced_subset_map(f, A) for A in sets]
    pairs = list(itertools.combinations(range(len(sets)), 2))
    dx = np.array([hausdorff(sets[i], sets[j], X) for i, j in pairs])
    dy = np.array([hausdorff(images[i], images[j], Y) for i, j in pairs])
    if eta.kind == "linear":
        ratio = dy / dx
        worst = float(ratio.max() - eta.coefficient * ratio.min())
        hi, lo = int(np.argmax(ratio)), int(np.argmin(ratio))
        witness = (sets[pairs[hi][0]], sets[pairs[hi][1]],
                   sets[pairs[lo][0]], sets[pairs[lo][1]])
        return QhCheckReport(worst <= tol, worst, witness, len(pairs) ** 2)
    ii = np.array([i for i, _ in pairs])
    jj = np.array([j for _, j in pairs])
    disjoint = ((ii[:, None] != ii[None, :]) & (ii[:, None] != jj[None, :])
                & (jj[:, None] != ii[None, :]) & (jj[:, None] != jj[None, :]))
    rx = dx[:, None] / dx[None, :]
    ry = dy[:, None] / dy[None, :]
    bound = np.vectorize(eta, otypes=[float])(rx)
    excess = np.where(disjoint, ry - bound, -np.inf)
    worst = float(excess.max())
    a, b = np.unravel_index(int(np.argmax(excess)), excess.shape)
    witness = (sets[pairs[a][0]], sets[pairs[a][1]],
               sets[pairs[b][0]], sets[pairs[b][1]])
    return QhCheckReport(worst <= tol, worst, witness, int(disjoint.sum()))
