"""Polygonal domains: validation, area, trapezoidization, critical vertices
and point location.

A domain is one counterclockwise outer ring plus zero or more clockwise hole
rings.  With that orientation the interior of the domain is always on the
left of every boundary edge, which the rest of the package relies on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

EPS_GEOM = 1e-9
COORD_LIMIT = 1e6


class Point(NamedTuple):
    x: float
    y: float


class DomainError(ValueError):
    """Invalid polygon instance.  ``ring`` is the offending ring index
    (0 is the outer ring, ``i + 1`` is hole ``i``)."""

    def __init__(self, message: str, ring: int | None = None):
        super().__init__(message if ring is None else f"ring {ring}: {message}")
        self.ring = ring


class SelfIntersection(DomainError):
    pass


class HoleOutsideOuter(DomainError):
    pass


class HolesOverlap(DomainError):
    pass


class DegenerateRing(DomainError):
    pass


class DiagonalAlignment(DomainError):
    """Two vertices lie on a common line of slope +1 or -1."""


class PointOutsideDomain(ValueError):
    pass


def _signed_area(ring) -> float:
    a = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(px, py, ax, ay, bx, by, eps=EPS_GEOM) -> bool:
    return (min(ax, bx) - eps <= px <= max(ax, bx) + eps
            and min(ay, by) - eps <= py <= max(ay, by) + eps)


def segments_intersect(a, b, c, d, eps=EPS_GEOM) -> bool:
    """Closed segments ab and cd share at least one point (tolerant)."""
    o1 = _orient(*a, *b, *c)
    o2 = _orient(*a, *b, *d)
    o3 = _orient(*c, *d, *a)
    o4 = _orient(*c, *d, *b)
    la = math.hypot(b[0] - a[0], b[1] - a[1])
    lc = math.hypot(d[0] - c[0], d[1] - c[1])
    e1, e2 = eps * la, eps * lc
    if ((o1 > e1 and o2 < -e1) or (o1 < -e1 and o2 > e1)) and (
            (o3 > e2 and o4 < -e2) or (o3 < -e2 and o4 > e2)):
        return True
    if abs(o1) <= e1 and _on_segment(*c, *a, *b, eps):
        return True
    if abs(o2) <= e1 and _on_segment(*d, *a, *b, eps):
        return True
    if abs(o3) <= e2 and _on_segment(*a, *c, *d, eps):
        return True
    if abs(o4) <= e2 and _on_segment(*b, *c, *d, eps):
        return True
    return False


def _point_in_ring(px, py, ring) -> bool:
    inside = False
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        if (y0 > py) != (y1 > py):
            xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
            if xc > px:
                inside = not inside
    return inside


@dataclass(frozen=True)
class PolygonalDomain:
    outer: tuple[Point, ...]
    holes: tuple[tuple[Point, ...], ...] = field(default_factory=tuple)

    @property
    def rings(self) -> tuple[tuple[Point, ...], ...]:
        return (self.outer,) + self.holes

    @property
    def n(self) -> int:
        return sum(len(r) for r in self.rings)

    @property
    def is_simple(self) -> bool:
        return not self.holes

    @cached_property
    def vertices(self) -> np.ndarray:
        """(n, 2) array of all vertices, outer ring first."""
        return np.array([p for r in self.rings for p in r], dtype=float)

    @cached_property
    def vertex_ring(self) -> np.ndarray:
        return np.array([i for i, r in enumerate(self.rings) for _ in r])

    @cached_property
    def neighbours(self) -> np.ndarray:
        """(n, 2) indices of the previous and next vertex along the ring."""
        out = []
        start = 0
        for r in self.rings:
            m = len(r)
            for i in range(m):
                out.append((start + (i - 1) % m, start + (i + 1) % m))
            start += m
        return np.array(out, dtype=int)

    @cached_property
    def edges(self) -> np.ndarray:
        """(n, 4) array of directed edges ``(ax, ay, bx, by)``; edge i leaves
        vertex i.  Interior of the domain is on the left."""
        v = self.vertices
        nxt = self.neighbours[:, 1]
        return np.hstack([v, v[nxt]])

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return (float(v[:, 0].min()), float(v[:, 1].min()),
                float(v[:, 0].max()), float(v[:, 1].max()))

    @cached_property
    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return math.hypot(x1 - x0, y1 - y0)

    @cached_property
    def area(self) -> float:
        return _signed_area(self.outer) + sum(_signed_area(h) for h in self.holes)

    def to_json(self) -> dict:
        return {"outer": [list(p) for p in self.outer],
                "holes": [[list(p) for p in h] for h in self.holes]}

    def shapely(self):
        from shapely.geometry import Polygon
        return Polygon(self.outer, self.holes)


def validate_domain(rings: Sequence[Sequence[Sequence[float]]], *,
                    check_diagonals: bool = False) -> PolygonalDomain:
    """Validate raw rings (outer first) and normalise orientation.

    Raises a :class:`DomainError` subclass naming the offending ring.  With
    ``check_diagonals`` the slope +-1 alignment guard is also enforced.
    """
    if not rings or len(rings[0]) < 3:
        raise DegenerateRing("need at least one ring with three vertices", 0)
    clean = []
    for ri, ring in enumerate(rings):
        pts = [Point(float(p[0]), float(p[1])) for p in ring]
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts.pop()
        if len(pts) < 3:
            raise DegenerateRing("fewer than three vertices", ri)
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise DegenerateRing("non-finite coordinate", ri)
            if abs(p.x) > COORD_LIMIT or abs(p.y) > COORD_LIMIT:
                raise DegenerateRing("coordinate outside [-1e6, 1e6]", ri)
        m = len(pts)
        for i in range(m):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % m]
            if math.hypot(b.x - a.x, b.y - a.y) <= EPS_GEOM:
                raise DegenerateRing("zero-length edge", ri)
            scale = math.hypot(b.x - a.x, b.y - a.y) * math.hypot(c.x - b.x, c.y - b.y)
            if abs(_orient(*a, *b, *c)) <= EPS_GEOM * scale:
                raise DegenerateRing(f"collinear consecutive vertices at {tuple(b)}", ri)
        for i in range(m):
            for j in range(i + 1, m):
                if j == i + 1 or (i == 0 and j == m - 1):
                    continue
                if segments_intersect(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m]):
                    raise SelfIntersection("ring crosses itself", ri)
        sa = _signed_area(pts)
        if abs(sa) <= EPS_GEOM:
            raise DegenerateRing("zero area", ri)
        want_ccw = ri == 0
        if (sa > 0) != want_ccw:
            pts.reverse()
        clean.append(tuple(pts))

    outer = clean[0]
    holes = clean[1:]
    for hi, hole in enumerate(holes, start=1):
        for a, b in _ring_edges(hole):
            for c, d in _ring_edges(outer):
                if segments_intersect(a, b, c, d):
                    raise HoleOutsideOuter("hole touches or crosses the outer ring", hi)
        if not _point_in_ring(hole[0].x, hole[0].y, outer):
            raise HoleOutsideOuter("hole lies outside the outer ring", hi)
    for hi in range(len(holes)):
        for hj in range(hi + 1, len(holes)):
            A, B = holes[hi], holes[hj]
            for a, b in _ring_edges(A):
                for c, d in _ring_edges(B):
                    if segments_intersect(a, b, c, d):
                        raise HolesOverlap(f"hole touches hole {hj + 1}", hi + 1)
            if _point_in_ring(A[0].x, A[0].y, B) or _point_in_ring(B[0].x, B[0].y, A):
                raise HolesOverlap(f"hole nested with hole {hj + 1}", hi + 1)

    dom = PolygonalDomain(outer, tuple(holes))
    if check_diagonals:
        pairs = diagonal_pairs(dom)
        if pairs:
            i, j = pairs[0]
            raise DiagonalAlignment(
                f"vertices {i} and {j} share a line of slope +-1", int(dom.vertex_ring[i]))
    return dom


def _ring_edges(ring):
    m = len(ring)
    return [(ring[i], ring[(i + 1) % m]) for i in range(m)]


def diagonal_pairs(domain: PolygonalDomain, eps: float = EPS_GEOM) -> list[tuple[int, int]]:
    v = domain.vertices
    dx = v[:, None, 0] - v[None, :, 0]
    dy = v[:, None, 1] - v[None, :, 1]
    bad = (np.abs(np.abs(dx) - np.abs(dy)) <= eps) & (np.abs(dx) > eps)
    ii, jj = np.nonzero(np.triu(bad, 1))
    return list(zip(ii.tolist(), jj.tolist()))


def perturb(domain: PolygonalDomain, seed: int = 0, rel: float = 1e-7,
            max_rounds: int = 50) -> PolygonalDomain:
    """Jitter vertices involved in slope +-1 alignments by ``rel * diameter``."""
    rng = np.random.default_rng(seed)
    dom = domain
    for _ in range(max_rounds):
        pairs = diagonal_pairs(dom)
        if not pairs:
            return dom
        bad = {j for _, j in pairs}
        step = rel * dom.diameter
        rings, k = [], 0
        for r in dom.rings:
            ring = []
            for p in r:
                if k in bad:
                    p = (p[0] + rng.uniform(-step, step), p[1] + rng.uniform(-step, step))
                ring.append(p)
                k += 1
            rings.append(ring)
        dom = validate_domain(rings)
    raise DiagonalAlignment("perturbation did not remove diagonal alignments")


def area(domain: PolygonalDomain) -> float:
    return domain.area


def load_instance(path) -> PolygonalDomain:
    with open(path) as fh:
        data = json.load(fh)
    return validate_domain([data["outer"], *data.get("holes", [])])


def domain_from_json(data: dict) -> PolygonalDomain:
    return validate_domain([data["outer"], *data.get("holes", [])])


# -- point location --------------------------------------------------------

def locate(domain: PolygonalDomain, p) -> str:
    """Classify ``p`` as ``"interior"``, ``"boundary"`` or ``"exterior"``.

    Points within ``1e-9 * diameter`` of an edge count as boundary.
    """
    px, py = float(p[0]), float(p[1])
    tol = EPS_GEOM * max(domain.diameter, 1.0)
    if point_edge_distance(domain, px, py) <= tol:
        return "boundary"
    inside = _point_in_ring(px, py, domain.outer)
    if inside and not any(_point_in_ring(px, py, h) for h in domain.holes):
        return "interior"
    return "exterior"


def point_edge_distance(domain: PolygonalDomain, px: float, py: float) -> float:
    e = domain.edges
    ax, ay, bx, by = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    dx, dy = bx - ax, by - ay
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
    return float(np.min(np.hypot(ax + t * dx - px, ay + t * dy - py)))


def contains(domain: PolygonalDomain, p) -> bool:
    return locate(domain, p) != "exterior"


def inside_mask(domain: PolygonalDomain, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorised even-odd test over all rings (boundary points undefined)."""
    inside = np.zeros(xs.shape, dtype=bool)
    for x0, y0, x1, y1 in domain.edges:
        cond = (y0 > ys) != (y1 > ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x0 + (ys - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (xc > xs)
    return inside


# -- trapezoidization ------------------------------------------------------

@dataclass(frozen=True)
class Trapezoid:
    """Slab piece between ``lo`` and ``hi`` along the sweep axis.

    ``bottom``/``top`` hold the cross coordinate of the lower/upper boundary
    at ``lo`` and ``hi``.  Coordinates are in the sweep frame: for a
    horizontal trapezoidization x and y are exchanged.
    """
    lo: float
    hi: float
    bottom: tuple[float, float]
    top: tuple[float, float]
    bottom_edge: int
    top_edge: int

    @property
    def area(self) -> float:
        return 0.5 * (self.hi - self.lo) * (
            (self.top[0] - self.bottom[0]) + (self.top[1] - self.bottom[1]))

    def height(self, s: float) -> float:
        t = (s - self.lo) / (self.hi - self.lo)
        return ((1 - t) * (self.top[0] - self.bottom[0])
                + t * (self.top[1] - self.bottom[1]))

    def area_below(self, s: float) -> float:
        """Area of the part with sweep coordinate <= s (a quadratic in s)."""
        s = min(max(s, self.lo), self.hi)
        return 0.5 * (s - self.lo) * (self.height(self.lo) + self.height(s))

    def polygon(self, axis: str = "vertical") -> list[tuple[float, float]]:
        pts = [(self.lo, self.bottom[0]), (self.hi, self.bottom[1]),
               (self.hi, self.top[1]), (self.lo, self.top[0])]
        if axis == "horizontal":
            pts = [(y, x) for x, y in pts]
        return pts


@dataclass(frozen=True)
class Trapezoidization:
    axis: str
    trapezoids: tuple[Trapezoid, ...]
    adjacency: tuple[tuple[int, int], ...]
    slabs: tuple[float, ...]

    @property
    def areas(self) -> np.ndarray:
        return np.array([t.area for t in self.trapezoids])

    def neighbours(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in self.trapezoids]
        for i, j in self.adjacency:
            nb[i].append(j)
            nb[j].append(i)
        return nb


def _unique_sorted(vals, eps):
    out = []
    for v in sorted(vals):
        if not out or v - out[-1] > eps:
            out.append(v)
    return out


def trapezoidize(domain: PolygonalDomain, axis: str = "vertical") -> Trapezoidization:
    """Cut the domain by axis-parallel lines through every vertex.

    Sweeps along x (``"vertical"`` walls) or along y (``"horizontal"``
    walls); the active-edge list keeps the work proportional to the number of
    edges crossing each slab.
    """
    if axis not in ("vertical", "horizontal"):
        raise ValueError(f"unknown axis {axis!r}")
    e = domain.edges
    if axis == "horizontal":
        e = e[:, [1, 0, 3, 2]]
    eps = EPS_GEOM * max(domain.diameter, 1.0)
    lo = np.minimum(e[:, 0], e[:, 2])
    hi = np.maximum(e[:, 0], e[:, 2])
    slabs = _unique_sorted(np.concatenate([e[:, 0], e[:, 2]]).tolist(), eps)

    order = np.argsort(lo, kind="stable")
    ptr = 0
    active: list[int] = []
    traps: list[Trapezoid] = []
    adjacency: list[tuple[int, int]] = []
    prev: list[int] = []
    for k in range(len(slabs) - 1):
        s0, s1 = slabs[k], slabs[k + 1]
        while ptr < len(order) and lo[order[ptr]] <= s0 + eps:
            i = int(order[ptr])
            if hi[i] - lo[i] > eps:
                active.append(i)
            ptr += 1
        active = [i for i in active if hi[i] >= s1 - eps]
        sm = 0.5 * (s0 + s1)
        cross = []
        for i in active:
            ax, ay, bx, by = e[i]
            t0 = ay + (by - ay) * (s0 - ax) / (bx - ax)
            t1 = ay + (by - ay) * (s1 - ax) / (bx - ax)
            cross.append((0.5 * (t0 + t1), t0, t1, i))
        cross.sort()
        cur = []
        for j in range(0, len(cross) - 1, 2):
            b, t = cross[j], cross[j + 1]
            cur.append(len(traps))
            traps.append(Trapezoid(s0, s1, (b[1], b[2]), (t[1], t[2]), b[3], t[3]))
        for i in prev:
            ti = traps[i]
            for j in cur:
                tj = traps[j]
                ov = min(ti.top[1], tj.top[0]) - max(ti.bottom[1], tj.bottom[0])
                if ov > eps:
                    adjacency.append((i, j))
        prev = cur
    return Trapezoidization(axis, tuple(traps), tuple(adjacency), tuple(slabs))


# -- critical vertices -----------------------------------------------------

@dataclass(frozen=True)
class CriticalVertex:
    index: int
    point: Point
    x_extremal: bool
    y_extremal: bool


def critical_vertices(domain: PolygonalDomain) -> list[CriticalVertex]:
    """Reflex vertices whose x or y coordinate is locally extremal on their
    ring.  An axis-parallel incident edge does not break extremality: the
    vertex qualifies when neither neighbour is strictly more extreme."""
    v = domain.vertices
    nb = domain.neighbours
    eps = EPS_GEOM * max(domain.diameter, 1.0)
    out = []
    for i in range(len(v)):
        p, q = v[nb[i, 0]], v[nb[i, 1]]
        c = v[i]
        if _orient(*p, *c, *q) >= 0:
            continue  # convex corner (interior on the left)
        flags = []
        for k in (0, 1):
            dp = p[k] - c[k]
            dq = q[k] - c[k]
            dp = 0.0 if abs(dp) <= eps else dp
            dq = 0.0 if abs(dq) <= eps else dq
            flags.append((dp <= 0 and dq <= 0) or (dp >= 0 and dq >= 0))
        if flags[0] or flags[1]:
            out.append(CriticalVertex(i, Point(float(c[0]), float(c[1])), flags[0], flags[1]))
    return out
