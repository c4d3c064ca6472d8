"""Named test instances and random domain generators."""

from __future__ import annotations

import math

import numpy as np

from .geom import DomainError, PolygonalDomain, validate_domain

UNIT_SQUARE = [[(0, 0), (1, 0), (1, 1), (0, 1)]]
L_SHAPE = [[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]]
HOLED_SQUARE = [[(0, 0), (4, 0), (4, 4), (0, 4)], [(1, 1), (3, 1), (3, 3), (1, 3)]]
TRIANGLE = [[(0, 0), (3, 0), (1, 2)]]
# two holes side by side, one watershed behind each
TWO_HOLES = [[(0, 0), (8, 0), (8, 4), (0, 4)],
             [(1.3, 1.1), (2.9, 1.2), (2.8, 2.9), (1.2, 2.8)],
             [(5.2, 1.15), (6.8, 1.05), (6.9, 2.85), (5.1, 2.95)]]
# comb with two long teeth on a thin spine: both area medians land in the gap
COMB = [[(0, 0), (7, 0), (7, 4), (6, 4), (6, 0.5), (1, 0.5), (1, 4), (0, 4)]]


def named(name: str) -> PolygonalDomain:
    table = {"unit_square": UNIT_SQUARE, "l_shape": L_SHAPE, "holed_square": HOLED_SQUARE,
             "triangle": TRIANGLE, "two_holes": TWO_HOLES, "comb": COMB}
    return validate_domain(table[name])


def star_polygon(n: int, rng: np.random.Generator, rmin: float = 0.35) -> list[tuple[float, float]]:
    """Random star-shaped polygon around the origin (always simple)."""
    while True:
        ang = np.sort(rng.uniform(0, 2 * math.pi, n))
        if np.min(np.diff(np.r_[ang, ang[0] + 2 * math.pi])) > 0.15 / n:
            break
    rad = rng.uniform(rmin, 1.0, n)
    return [(float(r * math.cos(a)), float(r * math.sin(a))) for a, r in zip(ang, rad)]


def _crosses(p, q, r, s):
    def o(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return o(p, q, r) * o(p, q, s) < 0 and o(r, s, p) * o(r, s, q) < 0


def two_opt_polygon(n: int, rng: np.random.Generator) -> list[tuple[float, float]]:
    """Random simple polygon: random points, tour untangled by 2-opt moves."""
    pts = [tuple(map(float, p)) for p in rng.random((n, 2))]
    order = list(range(n))
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                a, b = pts[order[i]], pts[order[i + 1]]
                c, d = pts[order[j]], pts[order[(j + 1) % n]]
                if _crosses(a, b, c, d):
                    order[i + 1:j + 1] = reversed(order[i + 1:j + 1])
                    changed = True
    return [pts[k] for k in order]


def random_simple(n: int, rng: np.random.Generator, kind: str | None = None) -> PolygonalDomain:
    kind = kind or ("star" if rng.random() < 0.5 else "two_opt")
    for _ in range(100):
        ring = star_polygon(n, rng) if kind == "star" else two_opt_polygon(n, rng)
        try:
            return validate_domain([ring])
        except DomainError:
            continue
    raise RuntimeError("could not generate a valid polygon")


def random_holed(rng: np.random.Generator, n_outer: int = 8, n_holes: int = 1,
                 hole_sides: int = 3) -> PolygonalDomain:
    """Star-shaped outer ring with small convex holes placed disjointly."""
    from shapely.geometry import Polygon
    for _ in range(200):
        outer = star_polygon(n_outer, rng, rmin=0.6)
        op = Polygon(outer)
        holes = []
        placed = []
        tries = 0
        while len(holes) < n_holes and tries < 200:
            tries += 1
            c = rng.uniform(-0.5, 0.5, 2)
            r = rng.uniform(0.08, 0.18)
            ang = np.sort(rng.uniform(0, 2 * math.pi, hole_sides))
            if np.min(np.diff(np.r_[ang, ang[0] + 2 * math.pi])) < 0.6:
                continue
            ring = [(float(c[0] + r * math.cos(a)), float(c[1] + r * math.sin(a))) for a in ang]
            hp = Polygon(ring)
            if not op.buffer(-0.03).contains(hp):
                continue
            if any(hp.buffer(0.03).intersects(q) for q in placed):
                continue
            holes.append(ring)
            placed.append(hp)
        if len(holes) < n_holes:
            continue
        try:
            return validate_domain([outer, *holes])
        except DomainError:
            continue
    raise RuntimeError("could not generate a holed domain")


def random_domain(rng: np.random.Generator, max_n: int = 14, max_holes: int = 2) -> PolygonalDomain:
    """Random domain with at most ``max_n`` vertices and 0..max_holes holes."""
    h = int(rng.integers(0, max_holes + 1))
    sides = 3
    n_outer = max(3, min(max_n - h * sides, int(rng.integers(4, 9))))
    if h == 0:
        return random_simple(int(rng.integers(4, max_n + 1)), rng)
    return random_holed(rng, n_outer, h, sides)
