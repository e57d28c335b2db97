"""Certification harness for maps between finite subset spaces.

Estimates Lipschitz and Hoelder constants by exhaustive or sampled pair
search, checks displacement bounds, splits, decomposes and merges sampled
set-valued paths, computes quasiconvexity obstruction constants, and builds
the exact rational chain witness showing that deleting the minimum of a
harmonic set admits no Lipschitz bound.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .metric import (
    DEFAULT_ENUMERATION_CAP,
    FSet,
    FiniteMetricSpace,
    _distance_fn,
    _ordered_points,
    _resolve_tol,
    enumerate_fsets,
    hausdorff,
    match_bijection,
    min_separation,
)

_PAIR_BUDGET = 20000
_BLOCK_BYTES = 2.0e8


def _subset_count(num_points, n):
    return sum(math.comb(num_points, k) for k in range(1, n + 1))


@dataclass(frozen=True, eq=False)
class SubsetDomain:
    """All nonempty subsets of a space with at most n points.

    The subsets are enumerated eagerly when their number fits under the cap;
    otherwise ``sets`` is None and searches over the domain fall back to
    seeded sampling.
    """

    space: object
    n: int
    count: int
    sets: tuple | None

    @classmethod
    def build(cls, space, n, cap=None):
        cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
        count = _subset_count(len(space.points), n)
        sets = tuple(enumerate_fsets(space, n)) if count <= cap else None
        return cls(space, n, count, sets)

    @property
    def exhaustive(self):
        return self.sets is not None


@dataclass(frozen=True)
class ConstantReport:
    """Best observed ratio Δ(f(A), f(B)) / Δ(A, B)^β over a pair search."""

    kind: str
    exponent: float
    constant: float
    witness: tuple
    pairs_examined: int
    mode: str


class _PackedFamily:
    """Index-packed sets over a shared point universe.

    ``idx`` is (num_sets, k) with each row the universe indices of one set,
    padded by repeating the first index (padding never changes Hausdorff
    distances).  ``dmin`` is (num_sets, universe) with the distance from each
    universe point to each set; a directed Hausdorff distance is then a
    gather of k columns followed by a max.
    """

    def __init__(self, sets, key, lookup, dist_univ):
        k = max(len(s) for s in sets)
        idx = np.empty((len(sets), k), dtype=np.intp)
        for row, s in enumerate(sets):
            cols = [lookup[key(p)] for p in s]
            idx[row, :len(cols)] = cols
            idx[row, len(cols):] = cols[0]
        self.idx = idx
        # dist_univ is either a square distance matrix or a 1-D array of
        # line positions; both yield (rows, universe) minima chunkwise
        chunk = max(1, int(2e7) // max(1, k * dist_univ.shape[0]))
        parts = []
        for r in range(0, len(sets), chunk):
            rows = idx[r:r + chunk]
            if dist_univ.ndim == 1:
                gap = np.abs(dist_univ[rows][:, :, None] - dist_univ[None, None, :])
                parts.append(gap.min(axis=1))
            else:
                parts.append(dist_univ[rows].min(axis=1))
        self.dmin = np.concatenate(parts) if len(parts) > 1 else parts[0]


def _hausdorff_block(fam, i0, j0, block):
    """Pairwise Hausdorff distances between two row blocks of a family."""
    ia = fam.idx[i0:i0 + block]
    jb = fam.idx[j0:j0 + block]
    forward = np.take(fam.dmin[j0:j0 + block], ia.ravel(), axis=1)
    forward = forward.reshape(-1, *ia.shape).max(axis=2).T
    backward = np.take(fam.dmin[i0:i0 + block], jb.ravel(), axis=1)
    backward = backward.reshape(-1, *jb.shape).max(axis=2)
    return np.maximum(forward, backward)


def _universe(sets, images, space):
    """Shared point universe: element key function, index lookup, distances."""
    if isinstance(space, FiniteMetricSpace):
        missing = next((p for fam in (sets, images) for s in fam for p in s
                        if p not in space._index), None)
        if missing is not None:
            raise ValueError("point %r is not in the space" % (missing,))
        return (lambda p: p), space._index, space.dist
    vals = sorted({float(p) for fam in (sets, images) for s in fam for p in s})
    lookup = {v: i for i, v in enumerate(vals)}
    return float, lookup, np.array(vals)


def _block_size(k_dom, k_img):
    b = math.sqrt(_BLOCK_BYTES / (32.0 * max(k_dom, k_img)))
    return max(64, min(1024, int(b)))


def _exhaustive_search(sets, images, space, beta):
    key, lookup, dist_univ = _universe(sets, images, space)
    dom = _PackedFamily(sets, key, lookup, dist_univ)
    img = _PackedFamily(images, key, lookup, dist_univ)
    N = len(sets)
    block = _block_size(dom.idx.shape[1], img.idx.shape[1])
    best = -math.inf
    arg = None
    pairs = 0
    for i0 in range(0, N, block):
        for j0 in range(i0, N, block):
            Hd = _hausdorff_block(dom, i0, j0, block)
            Hi = _hausdorff_block(img, i0, j0, block)
            mask = Hd > 0
            if beta != 1.0:
                denom = np.power(Hd, beta, out=np.ones_like(Hd), where=mask)
            else:
                denom = Hd
            R = np.divide(Hi, denom, out=np.full_like(Hi, -np.inf), where=mask)
            a, b = R.shape
            if i0 == j0:
                R[np.tril_indices(a)] = -np.inf
                pairs += a * (a - 1) // 2
            else:
                pairs += a * b
            peak = float(R.max()) if R.size else -math.inf
            if peak < best or peak == -math.inf:
                continue
            li, lj = np.argwhere(R == peak)[0]
            cand = (i0 + int(li), j0 + int(lj))
            if peak > best or cand < arg:
                best, arg = peak, cand
    if arg is None:
        raise ValueError("all pairs in the domain are at distance 0")
    return best, (sets[arg[0]], sets[arg[1]]), pairs


def _sampled_search(f, space, n, beta, seed, budget, image):
    rng = random.Random(seed)
    pts = list(_ordered_points(space))
    N = len(pts)
    pos = {p: i for i, p in enumerate(pts)}
    scored = {}
    best = [-math.inf, None, None]

    def score(A, B):
        ka, kb = A.elements, B.elements
        key = (ka, kb) if ka <= kb else (kb, ka)
        if key in scored or ka == kb:
            return
        dd = hausdorff(A, B, space)
        r = -math.inf if dd <= 0 else hausdorff(image(A), image(B), space) / dd ** beta
        scored[key] = r
        if r > best[0] or (r == best[0] and key < (best[1].elements, best[2].elements)):
            best[0], best[1], best[2] = r, FSet(key[0]), FSet(key[1])

    def random_subset():
        k = rng.randint(1, min(n, N))
        return FSet(pts[i] for i in rng.sample(range(N), k))

    def mutate(A):
        idx = sorted(pos[e] for e in A)
        roll = rng.random()
        if roll < 0.4 and len(idx) > 1:
            drop = rng.choice(idx)
            return FSet(pts[i] for i in idx if i != drop)
        if roll < 0.75:
            i = rng.choice(idx)
            for _ in range(4):
                j = min(N - 1, max(0, i + rng.choice((-3, -2, -1, 1, 2, 3))))
                if j not in idx:
                    return FSet(pts[j] if q == i else pts[q] for q in idx)
            return random_subset()
        if len(idx) < n:
            anchor = rng.choice(idx)
            lo, hi = max(0, anchor - 4), min(N, anchor + 5)
            j = rng.randrange(lo, hi) if rng.random() < 0.5 else rng.randrange(N)
            if j not in idx:
                return FSet([pts[j]] + [pts[q] for q in idx])
        return random_subset()

    def neighbors(A, B):
        out = []
        for S, other, flipped in ((A, B, False), (B, A, True)):
            idx = [pos[e] for e in S]
            taken = set(idx)
            for slot, i in enumerate(idx):
                for off in (-2, -1, 1, 2):
                    j = i + off
                    if 0 <= j < N and j not in taken:
                        moved = FSet(pts[j] if q == slot else pts[idx[q]]
                                     for q in range(len(idx)))
                        out.append((other, moved) if flipped else (moved, other))
        for S, other, flipped in ((A, B, False), (B, A, True)):
            if len(S) > 1:
                for e in S:
                    dropped = FSet(x for x in S if x != e)
                    out.append((S, dropped) if not flipped else (dropped, S))
        return out

    explore = budget // 2
    while len(scored) < explore:
        A = random_subset()
        B = mutate(A) if rng.random() < 0.7 else random_subset()
        score(A, B)
    stale = 0
    while len(scored) < budget and stale < 40:
        elites = heapq.nlargest(6, scored.items(), key=lambda kv: (kv[1], kv[0]))
        before = len(scored)
        for (ka, kb), _ in elites:
            for A, B in neighbors(FSet(ka), FSet(kb)):
                score(A, B)
                if len(scored) >= budget:
                    break
            if len(scored) >= budget:
                break
        stale = stale + 1 if len(scored) == before else 0
    if best[1] is None:
        raise ValueError("all sampled pairs are at distance 0")
    return best[0], (best[1], best[2]), len(scored)


def estimate_constant(f, domain, hoelder_exponent=1.0, space=None, seed=0,
                      pair_budget=_PAIR_BUDGET, tol=None):
    """Estimate the best constant C with Δ(f(A), f(B)) ≤ C Δ(A, B)^β.

    ``domain`` is either a SubsetDomain or an explicit sequence of FSets
    (searched exhaustively; pass the ambient ``space`` unless it is a subset
    of the real line).  Exhaustive mode reports a true maximum with a
    deterministic witness; sampled mode reports a lower bound found by
    seeded random pairs plus hill climbing on the best witnesses, and is
    deterministic under a fixed seed.
    """
    beta = float(hoelder_exponent)
    if not 0.0 < beta <= 1.0:
        raise ValueError("Hoelder exponent must lie in (0, 1]")
    kind = "lipschitz" if beta == 1.0 else "hoelder"
    cache = {}

    def image(A):
        out = cache.get(A)
        if out is None:
            out = f(A)
            cache[A] = out
        return out

    if isinstance(domain, SubsetDomain):
        space = domain.space
        if not domain.exhaustive:
            c, w, p = _sampled_search(f, space, domain.n, beta, seed,
                                      pair_budget, image)
            return ConstantReport(kind, beta, c, w, p, "sampled")
        sets = domain.sets
    else:
        sets = tuple(domain)
    if len(sets) < 2:
        raise ValueError("domain must contain at least two subsets")
    images = [image(A) for A in sets]
    c, w, p = _exhaustive_search(sets, images, space, beta)
    return ConstantReport(kind, beta, c, w, p, "exhaustive")


@dataclass(frozen=True)
class DisplacementReport:
    """Worst ratio of Δ(f(A), A) against factor * δ_n(A) over a domain."""

    ok: bool
    factor: float
    max_ratio: float
    worst: FSet | None
    worst_displacement: float


def check_displacement(f, domain, L, n, space=None, factor=None, tol=None):
    """Verify the displacement bound Δ(f(A), A) ≤ (L + 1) δ_n(A) on a domain.

    Sets with fewer than n points have zero separation, so the bound forces
    f to fix them; that is checked within tolerance.  Pass ``factor`` to test
    a different multiple of δ_n, e.g. n − 1 for the line retraction.
    """
    tol = _resolve_tol(tol)
    if isinstance(domain, SubsetDomain):
        if not domain.exhaustive:
            raise ValueError("displacement check needs an enumerated domain")
        space, sets = domain.space, domain.sets
    else:
        sets = tuple(domain)
    c = float(L) + 1.0 if factor is None else float(factor)
    ok = True
    ratio = 0.0
    worst = None
    worst_disp = 0.0
    for A in sets:
        disp = hausdorff(f(A), A, space)
        sep = min_separation(A, n, space)
        if sep == 0:
            bad = disp > tol
            r = math.inf if bad else 0.0
        else:
            r = disp / (c * sep)
            bad = r > 1.0 + tol
        if r > ratio:
            ratio, worst, worst_disp = r, A, disp
        if bad:
            ok = False
    return DisplacementReport(ok, c, ratio, worst, worst_disp)


def _set_diameter(A, space):
    d = _distance_fn(space)
    pts = tuple(A)
    if len(pts) < 2:
        return 0.0
    return max(d(p, q) for p, q in itertools.combinations(pts, 2))


@dataclass(frozen=True, eq=False)
class SampledPath:
    """A map from a finite parameter grid into a subset space.

    ``lipschitz`` is the best constant on consecutive samples, a lower bound
    for the constant of any underlying continuous path.
    """

    grid: tuple
    values: tuple
    lipschitz: float

    def __post_init__(self):
        if len(self.grid) != len(self.values) or not self.grid:
            raise ValueError("grid and values must be nonempty and aligned")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")

    @classmethod
    def from_samples(cls, grid, values, space=None):
        grid = tuple(float(t) for t in grid)
        values = tuple(v if isinstance(v, FSet) else FSet(v) for v in values)
        L = 0.0
        for (t0, A), (t1, B) in zip(zip(grid, values), zip(grid[1:], values[1:])):
            L = max(L, hausdorff(A, B, space) / (t1 - t0))
        return cls(grid, values, L)

    def span(self):
        return self.grid[-1] - self.grid[0]

    def max_step(self, space=None):
        return max((hausdorff(a, b, space)
                    for a, b in zip(self.values, self.values[1:])), default=0.0)

    def cardinalities(self):
        return {len(v) for v in self.values}


def split_gh(f, z0, E, L=None, D=None, space=None, tol=None):
    """Split a wide path f into two disjoint sub-paths g and h.

    E is a maximal well-separated subset of f(z0): its diameter is at most
    3LD(|E| - 1) and adding any other point of f(z0) pushes the diameter past
    3LD|E|.  Given diam f(z0) > 3(n-1)LD, the points within LD of E form
    g(z), the rest h(z); both halves are nonempty everywhere and inherit the
    Lipschitz constant.
    """
    tol = _resolve_tol(tol)
    L = f.lipschitz if L is None else float(L)
    D = f.span() if D is None else float(D)
    d = _distance_fn(space)
    try:
        i0 = f.grid.index(z0)
    except ValueError:
        raise ValueError("z0 must be one of the grid parameters") from None
    base = f.values[i0]
    E = E if isinstance(E, FSet) else FSet(E)
    if any(e not in base for e in E):
        raise ValueError("E must be a subset of f(z0)")
    n = max(len(v) for v in f.values)
    if not _set_diameter(base, space) > 3 * (n - 1) * L * D:
        raise ValueError("diam f(z0) must exceed 3(n-1)LD")
    if _set_diameter(E, space) > 3 * L * D * (len(E) - 1) + tol:
        raise ValueError("E is too spread out: diam E must be at most 3LD(|E|-1)")
    for x in base:
        if x in E:
            continue
        if _set_diameter(FSet(tuple(E) + (x,)), space) <= 3 * L * D * len(E) + tol:
            raise ValueError("E is not maximal: %r can be added" % (x,))
    g_vals, h_vals = [], []
    for z, val in zip(f.grid, f.values):
        near = [x for x in val if min(d(x, e) for e in E) <= L * D + tol]
        far = [x for x in val if x not in near]
        if not near or not far:
            raise ArithmeticError("split degenerates at parameter %r" % (z,))
        g_vals.append(FSet(near))
        h_vals.append(FSet(far))
    g = SampledPath.from_samples(f.grid, g_vals, space)
    h = SampledPath.from_samples(f.grid, h_vals, space)
    for part, name in ((g, "g"), (h, "h")):
        if part.lipschitz > L + tol:
            raise ArithmeticError("%s is not %g-Lipschitz on the sample" % (name, L))
    return g, h


def decompose_path(f, space=None, tol=None):
    """Split a constant-cardinality path into individually Lipschitz branches.

    Requires every sample to have exactly n points and every grid step to be
    shorter than δ_min / (3 L (n - 1)), which keeps consecutive samples close
    enough for nearest-neighbor matching to be a bijection.  Returns n paths
    with singleton values whose union recovers f exactly.
    """
    cards = f.cardinalities()
    if len(cards) != 1:
        raise ValueError("cardinality drop detected: sizes %s" % sorted(cards))
    n = cards.pop()
    if n == 1:
        return (f,)
    L = f.lipschitz
    delta_min = min(min_separation(v, n, space) for v in f.values)
    limit = delta_min / (3.0 * L * (n - 1)) if L > 0 else math.inf
    step = max(b - a for a, b in zip(f.grid, f.grid[1:]))
    if step >= limit:
        raise ValueError("step too coarse: %g, need below %g" % (step, limit))
    rows = [[p] for p in f.values[0]]
    current = [p for p in f.values[0]]
    for A, B in zip(f.values, f.values[1:]):
        link = match_bijection(A, B, space, tol=tol).as_dict()
        current = [link[p] for p in current]
        for row, p in zip(rows, current):
            row.append(p)
    return tuple(SampledPath.from_samples(f.grid, [FSet((p,)) for p in row], space)
                 for row in rows)


@dataclass(frozen=True)
class MergedCurve:
    """A sampled curve joining the two initial points of a collapsing pair
    path, with its length and the path length it is bounded against."""

    points: tuple
    length: float
    gamma_length: float


def merge_curve(gamma, space=None, tol=None):
    """Join the two points of Γ(t_0) by a curve of length at most 2ℓ.

    ℓ is the sampled length of Γ up to its first singleton value.  The two
    trajectories are tracked with the pairing of smaller maximal displacement
    at each step and concatenated back to back through the collapse point.
    """
    d = _distance_fn(space)
    sizes = [len(v) for v in gamma.values]
    if any(s > 2 for s in sizes):
        raise ValueError("merge_curve expects values with at most two points")
    try:
        stop = sizes.index(1)
    except ValueError:
        raise ValueError("no singleton reached along the path") from None
    first = tuple(gamma.values[0])
    if stop == 0:
        return MergedCurve((first[0],), 0.0, 0.0)
    length_gamma = sum(hausdorff(a, b, space)
                       for a, b in zip(gamma.values[:stop], gamma.values[1:stop + 1]))
    u, v = first
    path_u, path_v = [u], [v]
    for val in gamma.values[1:stop + 1]:
        pts = tuple(val)
        a, b = pts if len(pts) == 2 else (pts[0], pts[0])
        straight = max(d(u, a), d(v, b))
        crossed = max(d(u, b), d(v, a))
        if crossed < straight:
            a, b = b, a
        path_u.append(a)
        path_v.append(b)
        u, v = a, b
    curve = path_u + path_v[::-1][1:]
    cleaned = [curve[0]]
    for p in curve[1:]:
        if p != cleaned[-1]:
            cleaned.append(p)
    length = sum(d(a, b) for a, b in zip(cleaned, cleaned[1:]))
    return MergedCurve(tuple(cleaned), length, length_gamma)


@dataclass(frozen=True)
class QcBounds:
    """Radius and constant pair for the quasiconvexity obstruction: no
    L-Lipschitz retraction exists once short curves are forced to be longer
    than M times the distance at scale r."""

    L: float
    r: float
    M: float


def qc_bounds(L):
    if L < 1:
        raise ValueError("L must be at least 1")
    return QcBounds(float(L), 1.0 / (48 * (L + 1) ** 5),
                    float(4 * L * L * (L + 1) ** 2))


@dataclass(frozen=True)
class QuasiconvexityReport:
    """Worst ratio of shortest ε-graph path length to distance."""

    constant: float
    witness: tuple | None
    connected: bool
    eps: float


def quasiconvexity_constant(space, eps, tol=None):
    """Discrete quasiconvexity constant at neighbor radius eps.

    Builds the graph joining samples at distance at most eps, weights edges
    by distance, and returns the largest ratio of graph distance to metric
    distance.  A disconnected graph yields an infinite constant and the
    closest disconnected pair as witness.
    """
    if not isinstance(space, FiniteMetricSpace):
        space = FiniteMetricSpace.from_coords(getattr(space, "points", space))
    N = len(space.points)
    if N == 0:
        raise ValueError("space is empty")
    if N == 1:
        return QuasiconvexityReport(1.0, None, True, float(eps))
    D = space.dist
    adj = np.where(D <= eps, D, 0.0)
    np.fill_diagonal(adj, 0.0)
    lengths = shortest_path(adj, method="D", directed=False)
    off = ~np.eye(N, dtype=bool)
    if np.isinf(lengths[off]).any():
        cut = np.where(np.isinf(lengths) & off, D, np.inf)
        i, j = np.unravel_index(int(np.argmin(cut)), cut.shape)
        return QuasiconvexityReport(math.inf,
                                    (space.points[i], space.points[j]),
                                    False, float(eps))
    ratios = np.where(off, lengths / np.where(off, D, 1.0), 0.0)
    i, j = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    return QuasiconvexityReport(float(ratios[i, j]),
                                (space.points[i], space.points[j]),
                                True, float(eps))


@dataclass(frozen=True)
class ChainWitness:
    """Exact rational certificate that no L-Lipschitz map can delete the
    minimum on the harmonic set.

    The sets A = {0, y, z} and B = {0, x, y, z} are joined by a chain whose
    Hausdorff steps never exceed x², yet any L-Lipschitz deletion map would
    have to move mass by more than the displacement bound allows.
    """

    L: Fraction
    k: int
    x: Fraction
    y: Fraction
    z: Fraction
    A: FSet
    B: FSet
    chain: tuple
    max_step: Fraction


def _witness_parameters(L):
    k = 2
    while True:
        x = Fraction(1, k ** 3)
        y = Fraction(1, k ** 2 + 1)
        z = Fraction(1, k ** 2)
        if 2 * x < y and 2 * L * x * x < y * y and 2 * (L + 1) * (z - y) < x:
            return k, x, y, z
        k += 1


def lipschitz_obstruction_witness(L):
    """Chain witness against an L-Lipschitz minimum-deleting retraction.

    Picks the least k making x = 1/k³, y = 1/(k²+1), z = 1/k² satisfy
    2x < y, 2Lx² < y², and 2(L+1)(z−y) < x, then walks a fourth point from 0
    up to x through set elements in maximal steps of at most x².  All
    arithmetic is exact.
    """
    L = Fraction(L)
    if L < 1:
        raise ValueError("L must be at least 1")
    k, x, y, z = _witness_parameters(L)
    zero = Fraction(0)
    xx = x * x
    A = FSet((zero, y, z))
    chain = [A]
    w = zero
    while w < x:
        m = max(k ** 3, math.ceil(1 / (w + xx)))
        w = Fraction(1, m)
        chain.append(FSet((zero, w, y, z)))
    B = chain[-1]
    steps = (hausdorff(a, b) for a, b in zip(chain, chain[1:]))
    return ChainWitness(L, k, x, y, z, A, B, tuple(chain), max(steps))


def validate_obstruction_witness(w):
    """Independent exact check of every invariant of a ChainWitness.

    Verifies the three defining inequalities, the displacement contradiction
    (L+1)(z−y) < x/2, the chain endpoints, membership of every chain element
    in {0} ∪ {1/m}, and the step bound Δ ≤ x² on consecutive sets.  Raises
    ValueError naming the first failure; returns True otherwise.
    """
    L, x, y, z = w.L, w.x, w.y, w.z
    if not (isinstance(x, Fraction) and isinstance(y, Fraction)
            and isinstance(z, Fraction)):
        raise ValueError("witness parameters must be exact rationals")
    if not 0 < 2 * x < y < z:
        raise ValueError("ordering 0 < 2x < y < z fails")
    if not 2 * L * x * x < y * y:
        raise ValueError("inequality 2Lx^2 < y^2 fails")
    if not (L + 1) * (z - y) < x / 2:
        raise ValueError("inequality (L+1)(z-y) < x/2 fails")
    if w.chain[0] != FSet((Fraction(0), y, z)) or w.A != w.chain[0]:
        raise ValueError("chain must start at {0, y, z}")
    if w.chain[-1] != FSet((Fraction(0), x, y, z)) or w.B != w.chain[-1]:
        raise ValueError("chain must end at {0, x, y, z}")
    xx = x * x
    worst = Fraction(0)
    for S in w.chain:
        if len(S) > 4:
            raise ValueError("chain set %r has more than 4 points" % (S,))
        for e in S:
            e = Fraction(e)
            if e != 0 and e.numerator != 1:
                raise ValueError("element %r is not 0 or a unit fraction" % (e,))
    for a, b in zip(w.chain, w.chain[1:]):
        step = hausdorff(a, b)
        if step > xx:
            raise ValueError("chain step %r exceeds x^2" % (step,))
        worst = max(worst, step)
    if worst != w.max_step:
        raise ValueError("recorded max step %r disagrees with %r" % (w.max_step, worst))
    return True
