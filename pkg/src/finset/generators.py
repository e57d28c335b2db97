"""Deterministic example spaces: harmonic sets, Cantor dusts, snowflaked
grids, parabola and lattice-of-lines samples, Rickman's rug, and dendrogram
ultrametrics, plus the JSON spec dispatcher used by the command line.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .line import HarmonicSet, IntervalUnion
from .metric import FiniteMetricSpace, RealLineSpace, space_from_json
from .transforms import product_space


def harmonic_space(K):
    """{0} ∪ {1/k : 1 ≤ k ≤ K} on the real line."""
    return RealLineSpace(HarmonicSet(K).points())


def cantor_points(ratio=1.0 / 3.0, depth=2):
    """Left endpoints of the surviving intervals of a Cantor construction.

    Each interval [a, b] is replaced by its two end pieces of length
    ratio * (b - a); after ``depth`` rounds the 2^depth left endpoints are
    returned in increasing order.
    """
    if not 0 < ratio < 0.5:
        raise ValueError("ratio must lie strictly between 0 and 1/2")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    intervals = [(0.0, 1.0)]
    for _ in range(depth):
        nxt = []
        for a, b in intervals:
            w = (b - a) * ratio
            nxt.append((a, a + w))
            nxt.append((b - w, b))
        intervals = nxt
    return [a for a, _ in intervals]


def cantor_space(ratio=1.0 / 3.0, depth=2):
    return RealLineSpace(cantor_points(ratio, depth))


def snowflake_interval(alpha, per_side):
    """Uniform grid on [0, 1] with the snowflaked metric |x - y|^alpha.

    alpha = 1 gives the plain grid.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if per_side < 2:
        raise ValueError("need at least 2 grid points")
    xs = np.linspace(0.0, 1.0, per_side)
    points = tuple(float(x) for x in xs)
    D = np.abs(xs[:, None] - xs[None, :]) ** alpha
    return FiniteMetricSpace(points, D, validate=False)


def parabola_space(T, N):
    """N evenly spaced samples of {(x, x²) : |x| ≤ T} with planar distances."""
    if T <= 0 or N < 2:
        raise ValueError("need T > 0 and at least 2 samples")
    xs = np.linspace(-float(T), float(T), int(N))
    return FiniteMetricSpace.from_coords([(float(x), float(x) ** 2) for x in xs])


def lattice_lines_space(window, step):
    """Euclidean samples of ℝ × ℤ: horizontal lines at integer heights,
    discretized at the given step over [-window, window]."""
    if window <= 0 or step <= 0:
        raise ValueError("window and step must be positive")
    num = int(round(2 * window / step)) + 1
    xs = np.linspace(-float(window), float(window), num)
    ys = range(-math.floor(window), math.floor(window) + 1)
    return FiniteMetricSpace.from_coords(
        [(float(x), float(y)) for y in ys for x in xs])


def rickman_rug(per_side, alpha=0.5):
    """Product of a grid interval with a snowflaked grid interval under the
    max metric; the standard fractal surface."""
    plain = snowflake_interval(1.0, per_side)
    fuzzy = snowflake_interval(alpha, per_side)
    return product_space(plain, fuzzy)


def _tree_height(node):
    return node["merge_height"] if "children" in node else 0.0


def _collect_leaves(node, out, entries):
    if "children" not in node:
        out.append(node["point"])
        return [node["point"]]
    h = float(node["merge_height"])
    if h <= 0:
        raise ValueError("merge heights must be positive")
    groups = []
    for child in node["children"]:
        if _tree_height(child) > h:
            raise ValueError("child merge height exceeds parent height %g" % h)
        groups.append(_collect_leaves(child, out, entries))
    for gi in range(len(groups)):
        for gj in range(gi + 1, len(groups)):
            for p in groups[gi]:
                for q in groups[gj]:
                    entries.append((p, q, h))
    return [p for g in groups for p in g]


def dendrogram_space(tree):
    """Ultrametric space of a nested merge tree.

    Nodes are {"merge_height": h, "children": [...]} with leaves
    {"point": id}; two leaves sit at the height of their lowest common
    ancestor.  Heights must not increase toward the leaves.
    """
    leaves = []
    entries = []
    _collect_leaves(tree, leaves, entries)
    if len(set(leaves)) != len(leaves):
        raise ValueError("duplicate leaf ids in dendrogram")
    index = {p: i for i, p in enumerate(leaves)}
    D = np.zeros((len(leaves), len(leaves)))
    for p, q, h in entries:
        D[index[p], index[q]] = D[index[q], index[p]] = h
    return FiniteMetricSpace(tuple(leaves), D, validate=False)


def random_dendrogram(num_leaves, seed=0):
    """Random binary merge tree over integer leaves with sorted uniform
    heights; deterministic for a fixed seed."""
    if num_leaves < 1:
        raise ValueError("need at least one leaf")
    rng = random.Random(seed)
    forest = [{"point": i} for i in range(num_leaves)]
    heights = sorted(rng.uniform(0.0, 1.0) for _ in range(num_leaves - 1))
    for h in heights:
        i, j = rng.sample(range(len(forest)), 2)
        merged = {"merge_height": h, "children": [forest[i], forest[j]]}
        forest = [t for k, t in enumerate(forest) if k not in (i, j)]
        forest.append(merged)
    return forest[0]


def generate(spec):
    """Build the space described by a generator spec dict.

    Kinds: harmonic, cantor, snowflake, parabola, lattice_lines, rug,
    dendrogram (explicit tree or random via leaves/seed), interval_union,
    product (nested specs), and the raw line/finite forms.
    """
    kind = spec.get("kind")
    if kind == "harmonic":
        return harmonic_space(int(spec["K"]))
    if kind == "cantor":
        return cantor_space(float(spec.get("ratio", 1.0 / 3.0)),
                            int(spec.get("depth", 2)))
    if kind == "snowflake":
        return snowflake_interval(float(spec.get("alpha", 0.5)),
                                  int(spec.get("per_side", 9)))
    if kind == "parabola":
        return parabola_space(float(spec.get("T", 1.0)), int(spec.get("N", 17)))
    if kind == "lattice_lines":
        return lattice_lines_space(float(spec.get("window", 2.0)),
                                   float(spec.get("step", 0.5)))
    if kind == "rug":
        return rickman_rug(int(spec.get("per_side", 9)),
                           float(spec.get("alpha", 0.5)))
    if kind == "dendrogram":
        tree = spec.get("tree")
        if tree is None:
            tree = random_dendrogram(int(spec["leaves"]), int(spec.get("seed", 0)))
        return dendrogram_space(tree)
    if kind == "interval_union":
        return IntervalUnion(tuple(tuple(p) for p in spec["intervals"]))
    if kind == "product":
        return product_space(generate(spec["x"]), generate(spec["y"]))
    if kind in ("line", "finite", "explicit"):
        data = dict(spec)
        if kind == "explicit":
            data["kind"] = "finite"
        return space_from_json(data)
    raise ValueError("unknown space kind %r" % (kind,))
