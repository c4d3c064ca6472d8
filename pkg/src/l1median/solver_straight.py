"""Global minimiser of the average straight-line L1 distance.

With straight-line distances the objective separates into ``g(x) + h(y)``,
both convex, so the L1 origin (the point whose axis chords halve the area)
is optimal whenever it lies in the domain.  When it falls in a hole or
outside, the optimum is on the boundary: every boundary edge is cut at the
axis lines through all vertices, the directional derivative along each
piece is a quadratic, and its roots plus the piece endpoints are the
candidates.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .geom import EPS_GEOM, Point, PolygonalDomain, locate, trapezoidize

TIE_TOL = 1e-9


@dataclass(frozen=True)
class L1Origin:
    point: Point
    feasible: bool


@dataclass(frozen=True)
class Candidate:
    """A point with its objective value and where it came from.

    ``provenance`` is one of ``l1-origin``, ``origin-projection``,
    ``edge-interior``, ``overlay-vertex``, ``face-interior``, ``face-edge``.
    ``edge`` and ``t`` locate edge candidates (boundary edge id or face edge
    index, and the parameter along it).
    """
    point: Point
    value: float
    provenance: str
    edge: int | None = None
    t: float | None = None

    def key(self):
        return (self.value, self.point.x, self.point.y)

    def to_dict(self, digits: int = 12) -> dict:
        d = {"x": _num(self.point.x, digits), "y": _num(self.point.y, digits),
             "f": _num(self.value, digits), "provenance": self.provenance}
        if self.edge is not None:
            d["edge"] = self.edge
            d["t"] = _num(self.t, digits)
        return d


def _num(v, digits):
    return float(f"{v:.{digits}g}")


@dataclass(frozen=True)
class SolveResult:
    metric: str
    optimum: Candidate
    candidates: tuple[Candidate, ...]
    ties: tuple[Candidate, ...] = field(default_factory=tuple)
    extra: dict = field(default_factory=dict)
    # in-process extras (fits, overlay); not part of the record
    aux: dict = field(default_factory=dict, compare=False, repr=False)

    def __iter__(self):
        yield self.optimum
        yield list(self.candidates)

    def to_record(self, digits: int = 12) -> dict:
        rec = {"metric": self.metric,
               "optimum": self.optimum.to_dict(digits),
               "candidates_evaluated": len(self.candidates),
               "ties": [c.to_dict(digits) for c in self.ties]}
        rec.update(self.extra)
        return rec

    def to_json(self, digits: int = 12) -> str:
        return json.dumps(self.to_record(digits), sort_keys=True)


def finish(metric: str, cands: list[Candidate], diameter: float, tie_tol: float = TIE_TOL,
           extra: dict | None = None, aux: dict | None = None) -> SolveResult:
    """Sort candidates deterministically and collect distinct ties."""
    cands = sorted(cands, key=Candidate.key)
    best = cands[0]
    ties: list[Candidate] = []
    sep = 1e-7 * max(diameter, 1.0)
    for c in cands:
        if c.value > best.value + tie_tol:
            break
        if all(math.hypot(c.point.x - t.point.x, c.point.y - t.point.y) > sep for t in ties):
            ties.append(c)
    return SolveResult(metric, best, tuple(cands), tuple(ties), extra or {}, aux or {})


# -- axis profiles ---------------------------------------------------------

class AxisProfile:
    """Area and first moment of the domain below a sweep coordinate.

    Built from a trapezoidization; inside each slab the total chord length
    is linear in the sweep coordinate, so both quantities are polynomials.
    """

    def __init__(self, domain: PolygonalDomain, axis: str):
        tz = trapezoidize(domain, axis)
        slabs = list(tz.slabs)
        h0 = np.zeros(len(slabs) - 1)
        h1 = np.zeros(len(slabs) - 1)
        for t in tz.trapezoids:
            k = bisect_right(slabs, 0.5 * (t.lo + t.hi)) - 1
            h0[k] += t.top[0] - t.bottom[0]
            h1[k] += t.top[1] - t.bottom[1]
        self.s = np.array(slabs)
        self.h0, self.h1 = h0, h1
        w = np.diff(self.s)
        area = 0.5 * w * (h0 + h1)
        mom = np.array([self._mom(k, self.s[k + 1]) for k in range(len(w))])
        self.cum_area = np.concatenate([[0.0], np.cumsum(area)])
        self.cum_mom = np.concatenate([[0.0], np.cumsum(mom)])
        self.total = float(self.cum_area[-1])
        self.total_mom = float(self.cum_mom[-1])

    def _slab(self, s):
        k = int(np.searchsorted(self.s, s, side="right")) - 1
        return min(max(k, 0), len(self.s) - 2)

    def _lin(self, k):
        lo, hi = self.s[k], self.s[k + 1]
        slope = (self.h1[k] - self.h0[k]) / (hi - lo)
        return lo, self.h0[k], slope

    def _area(self, k, s):
        lo, h, m = self._lin(k)
        d = s - lo
        return h * d + 0.5 * m * d * d

    def _mom(self, k, s):
        lo, h, m = self._lin(k)
        d = s - lo
        # integral of (lo + u) * (h + m u) du over [0, d]
        return lo * (h * d + 0.5 * m * d * d) + 0.5 * h * d * d + m * d ** 3 / 3.0

    def below(self, s: float) -> tuple[float, float]:
        if s <= self.s[0]:
            return 0.0, 0.0
        if s >= self.s[-1]:
            return self.total, self.total_mom
        k = self._slab(s)
        return (float(self.cum_area[k] + self._area(k, s)),
                float(self.cum_mom[k] + self._mom(k, s)))

    def integral_abs(self, s: float) -> float:
        """Integral over the domain of ``|s - u|`` (u the sweep coordinate)."""
        A, M = self.below(s)
        return s * A - M + (self.total_mom - M) - s * (self.total - A)

    def median(self) -> float:
        half = 0.5 * self.total
        k = int(np.searchsorted(self.cum_area, half, side="left")) - 1
        k = min(max(k, 0), len(self.s) - 2)
        lo, h, m = self._lin(k)
        need = half - self.cum_area[k]
        if abs(m) < 1e-14 * max(h, 1.0):
            d = need / h
        else:
            # 0.5 m d^2 + h d - need = 0, stable root
            disc = max(h * h + 2.0 * m * need, 0.0)
            d = 2.0 * need / (h + math.sqrt(disc))
        return float(lo + d)


class StraightObjective:
    """Fast exact ``f``, ``grad f`` for the straight-line metric."""

    def __init__(self, domain: PolygonalDomain):
        self.domain = domain
        self.px = AxisProfile(domain, "vertical")
        self.py = AxisProfile(domain, "horizontal")
        self.mu = domain.area

    def __call__(self, x: float, y: float) -> float:
        return (self.px.integral_abs(x) + self.py.integral_abs(y)) / self.mu

    def gradient(self, x: float, y: float) -> tuple[float, float]:
        w = self.px.below(x)[0]
        s = self.py.below(y)[0]
        return (2.0 * w - self.mu) / self.mu, (2.0 * s - self.mu) / self.mu


# -- origin and boundary ---------------------------------------------------

def l1_origin(domain: PolygonalDomain) -> L1Origin:
    """The point whose vertical and horizontal chords both halve the area."""
    x = AxisProfile(domain, "vertical").median()
    y = AxisProfile(domain, "horizontal").median()
    p = Point(x, y)
    return L1Origin(p, locate(domain, p) != "exterior")


def _edge_cuts(domain: PolygonalDomain, extra_x=(), extra_y=()):
    """Parameters cutting every edge at the vertex axis lines."""
    V = domain.vertices
    xs = np.unique(np.concatenate([V[:, 0], np.asarray(extra_x, dtype=float)]))
    ys = np.unique(np.concatenate([V[:, 1], np.asarray(extra_y, dtype=float)]))
    out = []
    for ax, ay, bx, by in domain.edges:
        ts = {0.0, 1.0}
        for vals, a, b in ((xs, ax, bx), (ys, ay, by)):
            if abs(b - a) > 0:
                t = (vals - a) / (b - a)
                ts.update(float(v) for v in t[(t > 1e-12) & (t < 1 - 1e-12)])
        out.append(sorted(ts))
    return out


def _inward_normal(edge):
    ax, ay, bx, by = edge
    return -(by - ay), bx - ax


def dominated_boundary(domain: PolygonalDomain, origin: L1Origin) -> list[tuple[int, float, float]]:
    """Boundary pieces ``(edge, t0, t1)`` that no other boundary point
    dominates.

    A boundary point ``p`` is dominated when moving from it towards the
    origin along x or along y enters the interior: the domain then contains
    points of the rectangle spanned by ``p`` and the origin next to ``p``,
    and following that move to the boundary gives a point at least as good.
    """
    xm, ym = origin.point
    cuts = _edge_cuts(domain, [xm], [ym])
    keep = []
    for i, (edge, ts) in enumerate(zip(domain.edges, cuts)):
        nx, ny = _inward_normal(edge)
        ax, ay, bx, by = edge
        for t0, t1 in zip(ts[:-1], ts[1:]):
            tm = 0.5 * (t0 + t1)
            px, py = ax + tm * (bx - ax), ay + tm * (by - ay)
            gx = math.copysign(1.0, xm - px) if xm != px else 0.0
            gy = math.copysign(1.0, ym - py) if ym != py else 0.0
            if gx * nx > 0 or gy * ny > 0:
                continue
            keep.append((i, t0, t1))
    return keep


def _quadratic_roots(c0, c1, c2) -> list[float]:
    scale = max(abs(c0), abs(c1), abs(c2))
    if scale == 0.0:
        return []
    c0, c1, c2 = c0 / scale, c1 / scale, c2 / scale
    if abs(c2) < 1e-12:
        if abs(c1) < 1e-12:
            return []
        return [-c0 / c1]
    disc = c1 * c1 - 4 * c2 * c0
    if -1e-12 <= disc < 0:
        disc = 0.0
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (c1 + math.copysign(sq, c1))
    roots = [q / c2]
    if q != 0.0:
        roots.append(c0 / q)
    return roots


def directional_roots(grad, p0, p1) -> list[float]:
    """Zeros in [0, 1] of ``grad(p(t)) . (p1 - p0)`` on a piece where it is a
    quadratic, recovered from three interior samples."""
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    ts = np.array([0.25, 0.5, 0.75])
    g = []
    for t in ts:
        gx, gy = grad(p0[0] + t * dx, p0[1] + t * dy)
        g.append(gx * dx + gy * dy)
    c2, c1, c0 = np.polyfit(ts, g, 2)
    return [t for t in _quadratic_roots(c0, c1, c2) if -1e-12 <= t <= 1 + 1e-12]


def _origin_projections(domain: PolygonalDomain, origin: Point) -> list[Point]:
    xm, ym = origin
    out = []
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        best = math.inf
        for ax, ay, bx, by in domain.edges:
            ex, ey = bx - ax, by - ay
            den = dx * ey - dy * ex
            if den == 0:
                continue
            t = ((ax - xm) * ey - (ay - ym) * ex) / den
            u = ((ax - xm) * dy - (ay - ym) * dx) / den
            if t >= 0 and -1e-12 <= u <= 1 + 1e-12:
                best = min(best, t)
        if math.isfinite(best):
            out.append(Point(xm + best * dx, ym + best * dy))
    return out


def solve_straight(domain: PolygonalDomain, *, prune: bool = True,
                   tie_tol: float = TIE_TOL) -> SolveResult:
    """Exact minimiser of the average straight-line L1 distance.

    Returns a :class:`SolveResult`; unpacking it gives ``(optimum,
    candidates)``.
    """
    f = StraightObjective(domain)
    origin = l1_origin(domain)
    zm = origin.point
    extra = {"l1_origin": {"x": _num(zm.x, 12), "y": _num(zm.y, 12),
                           "feasible": origin.feasible}}
    if origin.feasible:
        c = Candidate(zm, f(*zm), "l1-origin")
        return finish("l1-straight", [c], domain.diameter, tie_tol, extra)

    if prune:
        pieces = dominated_boundary(domain, origin)
    else:
        cuts = _edge_cuts(domain, [zm.x], [zm.y])
        pieces = [(i, t0, t1) for i, ts in enumerate(cuts) for t0, t1 in zip(ts[:-1], ts[1:])]
    cands: list[Candidate] = []
    seen = set()
    E = domain.edges
    for i, t0, t1 in pieces:
        ax, ay, bx, by = E[i]
        p0 = (ax + t0 * (bx - ax), ay + t0 * (by - ay))
        p1 = (ax + t1 * (bx - ax), ay + t1 * (by - ay))
        for t, p in ((t0, p0), (t1, p1)):
            key = (round(p[0], 12), round(p[1], 12))
            if key not in seen:
                seen.add(key)
                prov = "overlay-vertex"
                cands.append(Candidate(Point(*p), f(*p), prov, i, t))
        for s in directional_roots(f.gradient, p0, p1):
            s = min(max(s, 0.0), 1.0)
            t = t0 + s * (t1 - t0)
            p = (ax + t * (bx - ax), ay + t * (by - ay))
            cands.append(Candidate(Point(*p), f(*p), "edge-interior", i, t))
    for p in _origin_projections(domain, zm):
        cands.append(Candidate(p, f(*p), "origin-projection"))
    return finish("l1-straight", cands, domain.diameter, tie_tol, extra)
