"""Geodesic L1 distances and shortest-path maps.

Distances come from a Dijkstra pass over the visibility graph of the domain
vertices.  For the maps themselves the domain is cut once, independently of
the source, into convex *pieces*: the arrangement of the boundary, the axis
lines through every vertex, and the visibility windows of every vertex.
Inside a piece the set of visible vertices is fixed and each vertex lies in
a fixed quadrant, so the distance to a source ``Z`` is the lower envelope of
at most four linear functions (one per gradient class ``(+-1, +-1)``).  The
source itself is handled per query by splitting pieces along its own windows
and axis lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import shapely
from scipy.sparse.csgraph import shortest_path
from shapely.geometry import LineString, Point as SPoint, Polygon
from shapely.ops import linemerge, polygonize, unary_union
from shapely.prepared import prep

from . import kernels
from .geom import EPS_GEOM, Point, PointOutsideDomain, PolygonalDomain, locate

SOURCE = -1


class DegeneratePosition(ValueError):
    """The query point sits where the first move of some shortest path is
    ambiguous (on a watershed, or axis-aligned with a relevant vertex)."""


class DegenerateBisector(ValueError):
    """A bisector came out with a direction other than horizontal, vertical
    or diagonal; the instance needs perturbation."""


def _l1(a, b) -> float:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _blocked(src, pts: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """True where segment ``src``-``pts[i]`` properly crosses a domain edge."""
    zx, zy = src
    px, py = pts[:, 0], pts[:, 1]
    out = np.zeros(len(pts), dtype=bool)
    for cx, cy, dx, dy in edges:
        o1 = (px - zx) * (cy - zy) - (py - zy) * (cx - zx)
        o2 = (px - zx) * (dy - zy) - (py - zy) * (dx - zx)
        o3 = (dx - cx) * (zy - cy) - (dy - cy) * (zx - cx)
        o4 = (dx - cx) * (py - cy) - (dy - cy) * (px - cx)
        out |= (o1 * o2 < 0.0) & (o3 * o4 < 0.0)
    return out


@dataclass(frozen=True)
class GeodesicLabeling:
    """Geodesic distances from ``source`` to every domain vertex.

    ``pred[v]`` is the vertex before ``v`` on a shortest path (``-1`` for the
    source).  ``first[v]`` is the first vertex visited after leaving the
    source.  ``move`` holds the sign of the first move in x and y, 0 where
    tied shortest paths leave in different directions.
    """
    source: Point
    dist: np.ndarray
    pred: np.ndarray
    first: np.ndarray
    move: np.ndarray
    visible: np.ndarray

    def as_dict(self) -> dict[int, tuple[float, int]]:
        return {i: (float(d), int(p)) for i, (d, p) in enumerate(zip(self.dist, self.pred))}


class DomainIndex:
    """Source-independent structures for one domain (built lazily)."""

    def __init__(self, domain: PolygonalDomain):
        self.domain = domain
        self.V = domain.vertices
        self.E = domain.edges
        self.n = domain.n
        self.diam = domain.diameter
        self.tol = 1e-11 * max(self.diam, 1.0)
        self.poly = domain.shapely()
        self._prep = prep(self.poly)
        nb = domain.neighbours
        V = self.V
        a, b = V[nb[:, 0]], V[nb[:, 1]]
        # interior is on the left of every edge, so a right turn is reflex
        self.reflex = ((V[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1])
                       - (V[:, 1] - a[:, 1]) * (b[:, 0] - a[:, 0])) < 0

    # -- visibility --------------------------------------------------------

    def sees(self, a, b) -> bool:
        if _l1(a, b) <= self.tol:
            return True
        return self._prep.covers(LineString([tuple(a), tuple(b)]))

    @cached_property
    def vis(self) -> np.ndarray:
        n = self.n
        vis = np.eye(n, dtype=bool)
        for i in range(n):
            for j in range(i + 1, n):
                vis[i, j] = vis[j, i] = self.sees(self.V[i], self.V[j])
        return vis

    @cached_property
    def _apsp(self):
        V = self.V
        w = np.abs(V[:, None, 0] - V[None, :, 0]) + np.abs(V[:, None, 1] - V[None, :, 1])
        g = np.where(self.vis, w, 0.0)
        return shortest_path(g, method="D", directed=False, return_predecessors=True)

    @property
    def DV(self) -> np.ndarray:
        return self._apsp[0]

    def _ray_hit(self, w: int, d) -> tuple[float, float] | None:
        """First boundary point hit by the ray from vertex ``w`` along ``d``."""
        wx, wy = self.V[w]
        best = math.inf
        nb = self.domain.neighbours[w]
        for i, (cx, cy, ex, ey) in enumerate(self.E):
            if i == w or i == nb[0]:
                continue
            sx, sy = ex - cx, ey - cy
            den = d[0] * sy - d[1] * sx
            if abs(den) < 1e-300:
                continue
            t = ((cx - wx) * sy - (cy - wy) * sx) / den
            u = ((cx - wx) * d[1] - (cy - wy) * d[0]) / den
            if t > 1e-12 and -1e-12 <= u <= 1 + 1e-12 and t < best:
                best = t
        if not math.isfinite(best):
            return None
        return wx + best * d[0], wy + best * d[1]

    def windows_from(self, src, visible: np.ndarray, extend: float = 0.0) -> np.ndarray:
        """Windows of the visibility polygon of ``src``.

        A window leaves reflex vertex ``w`` along the ray ``src -> w`` when
        both boundary edges at ``w`` lie strictly on one side of that ray.
        """
        nb = self.domain.neighbours
        out = []
        sx, sy = float(src[0]), float(src[1])
        for w in np.flatnonzero(visible & self.reflex):
            wx, wy = self.V[w]
            dx, dy = wx - sx, wy - sy
            ln = math.hypot(dx, dy)
            if ln <= self.tol:
                continue
            a, b = self.V[nb[w, 0]], self.V[nb[w, 1]]
            sa = dx * (a[1] - wy) - dy * (a[0] - wx)
            sb = dx * (b[1] - wy) - dy * (b[0] - wx)
            eps = 1e-12 * ln * max(self.diam, 1.0)
            if not ((sa > eps and sb > eps) or (sa < -eps and sb < -eps)):
                continue
            hit = self._ray_hit(w, (dx / ln, dy / ln))
            if hit is None:
                continue
            hx, hy = hit
            if extend:
                hx += extend * dx / ln
                hy += extend * dy / ln
            out.append((wx, wy, hx, hy))
        return np.array(out, dtype=float).reshape(-1, 4)

    @cached_property
    def vertex_windows(self) -> np.ndarray:
        ext = 1e-9 * max(self.diam, 1.0)
        parts = [self.windows_from(self.V[v], self.vis[v], extend=ext) for v in range(self.n)]
        return np.vstack(parts) if parts else np.zeros((0, 4))

    # -- pieces ------------------------------------------------------------

    @cached_property
    def pieces(self):
        """Convex pieces as ``(coords, offsets, centroids, mask, cls)``."""
        x0, y0, x1, y1 = self.domain.bbox
        pad = 0.01 * max(self.diam, 1.0)
        lines = [LineString([(e[0], e[1]), (e[2], e[3])]) for e in self.E]
        for x in np.unique(self.V[:, 0]):
            lines.append(LineString([(x, y0 - pad), (x, y1 + pad)]))
        for y in np.unique(self.V[:, 1]):
            lines.append(LineString([(x0 - pad, y), (x1 + pad, y)]))
        for w in self.vertex_windows:
            lines.append(LineString([(w[0], w[1]), (w[2], w[3])]))
        merged = unary_union(lines)
        coords, offsets, cents = [], [0], []
        for face in polygonize(merged):
            if face.area <= 0.0:
                continue
            rp = face.representative_point()
            if not self._prep.contains(rp):
                continue
            face = shapely.geometry.polygon.orient(face, 1.0)
            ring = list(face.exterior.coords)[:-1]
            coords.extend(ring)
            offsets.append(len(coords))
            c = face.centroid
            cents.append((c.x, c.y))
        coords = np.array(coords, dtype=float)
        offsets = np.array(offsets, dtype=np.int_)
        cents = np.array(cents, dtype=float)
        P = len(cents)
        mask = np.zeros((P, self.n), dtype=bool)
        cls = np.zeros((P, self.n), dtype=np.int8)
        for v in range(self.n):
            mask[:, v] = ~_blocked(self.V[v], cents, self.E)
            cls[:, v] = (2 * (cents[:, 0] > self.V[v, 0])
                         + (cents[:, 1] > self.V[v, 1]))
        return coords, offsets, cents, mask, cls

    # -- per-source work ---------------------------------------------------

    def interior_point(self, Z) -> np.ndarray:
        """``Z`` itself, or for a boundary point a copy pushed
        at least ``1e-12 * diameter`` into the interior."""
        Z = np.asarray(Z, dtype=float)
        sp = SPoint(Z[0], Z[1])
        if self._prep.contains(sp):
            return Z
        if self.poly.distance(sp) > 1e-9 * max(self.diam, 1.0):
            raise PointOutsideDomain(f"{tuple(map(float, Z))} is outside the domain")
        E = self.E
        ax, ay, bx, by = E[:, 0], E[:, 1], E[:, 2], E[:, 3]
        dx, dy = bx - ax, by - ay
        ln = np.hypot(dx, dy)
        t = np.clip(((Z[0] - ax) * dx + (Z[1] - ay) * dy) / (ln * ln), 0.0, 1.0)
        dist = np.hypot(ax + t * dx - Z[0], ay + t * dy - Z[1])
        near = dist <= dist.min() + 1e-9 * max(self.diam, 1.0)
        nx, ny = (-dy / ln)[near].sum(), (dx / ln)[near].sum()
        nn = math.hypot(nx, ny)
        if nn == 0.0:
            return Z
        step = 1e-12 * max(self.diam, 1.0)
        for k in range(12):
            W = Z + (step * 4 ** k / nn) * np.array([nx, ny])
            if self._prep.contains(SPoint(W[0], W[1])):
                return W
        return Z

    def label(self, Z) -> GeodesicLabeling:
        Z = self.interior_point(Z)
        V = self.V
        visZ = np.array([self.sees(Z, v) for v in V], dtype=bool)
        lz = np.abs(V[:, 0] - Z[0]) + np.abs(V[:, 1] - Z[1])
        cand = np.where(visZ, lz, np.inf)[:, None] + self.DV
        dist = cand.min(axis=0)
        first = cand.argmin(axis=0)
        preds = self._apsp[1]
        move = np.zeros((self.n, 2))
        for v in range(self.n):
            tied = np.flatnonzero(cand[:, v] <= dist[v] + self.tol)
            signs = np.array([self._first_move(Z, u, v, preds) for u in tied])
            for k in range(2):
                s = signs[:, k]
                s = s[~np.isnan(s)]
                if len(s) == 0:
                    move[v, k] = np.nan
                elif np.all(s == s[0]):
                    move[v, k] = s[0]
        pred = np.where(first == np.arange(self.n), SOURCE, preds[first, np.arange(self.n)])
        return GeodesicLabeling(Point(float(Z[0]), float(Z[1])), dist, pred.astype(int),
                                first.astype(int), move, visZ)

    def _first_move(self, Z, u: int, v: int, preds) -> tuple[float, float]:
        """Sign of the first nonzero x and y move on the path Z -> u ~> v.

        NaN marks an axis along which the path does not move at all before
        reaching ``v``; the direction then comes from the final leg.
        """
        path = [v]
        while path[-1] != u:
            path.append(int(preds[u, path[-1]]))
        out = [np.nan, np.nan]
        for w in reversed(path):
            for k in range(2):
                if np.isnan(out[k]) and abs(self.V[w, k] - Z[k]) > self.tol:
                    out[k] = 1.0 if self.V[w, k] > Z[k] else -1.0
        return out[0], out[1]

    def envelope_inputs(self, lab: GeodesicLabeling):
        coords, offsets, cents, mask, cls = self.pieces
        D = lab.dist
        P = len(cents)
        consts = np.full((P, 4), np.inf)
        roots = np.full((P, 4), -2, dtype=np.int_)
        dirs = np.zeros((P, 4, 2))
        at_source = (np.abs(self.V[:, 0] - lab.source.x)
                     + np.abs(self.V[:, 1] - lab.source.y)) <= self.tol
        for k, (sx, sy) in enumerate(kernels.CLASS_SIGNS):
            vals = np.where(at_source, np.inf, D - (sx * self.V[:, 0] + sy * self.V[:, 1]))
            mat = np.where(mask & (cls == k), vals[None, :], np.inf)
            m = mat.min(axis=1)
            tied = mat <= m[:, None] + self.tol
            win = np.argmax(np.where(tied, D[None, :], -np.inf), axis=1)
            ok = np.isfinite(m)
            consts[:, k] = m
            roots[ok, k] = win[ok]
            mv = lab.move[win[ok]]
            dirs[ok, k] = np.where(np.isnan(mv), (sx, sy), mv)
        return coords, offsets, consts, dirs, roots

    def source_windows(self, lab: GeodesicLabeling) -> np.ndarray:
        return self.windows_from(lab.source, lab.visible)

    def envelope(self, lab: GeodesicLabeling, collect: bool = False, backend=None):
        coords, offsets, consts, dirs, roots = self.envelope_inputs(lab)
        return kernels.envelope_pass(coords, offsets, consts, dirs, roots,
                                     (lab.source.x, lab.source.y),
                                     self.source_windows(lab), self.E, self.tol,
                                     collect=collect, backend=backend)

    def point_distance(self, lab: GeodesicLabeling, p) -> tuple[float, int]:
        """Geodesic distance from the labelled source to ``p`` and its root."""
        p = np.asarray(p, dtype=float)
        Z = np.array(lab.source)
        if not _blocked(Z, p[None, :], self.E)[0] and self.sees(Z, p):
            return _l1(Z, p), SOURCE
        vis = np.array([self.sees(v, p) for v in self.V], dtype=bool)
        tot = np.where(vis, lab.dist + np.abs(self.V[:, 0] - p[0]) + np.abs(self.V[:, 1] - p[1]),
                       np.inf)
        m = tot.min()
        tied = np.flatnonzero(tot <= m + self.tol)
        root = int(tied[np.argmax(lab.dist[tied])])
        return float(m), root


@lru_cache(maxsize=16)
def get_index(domain: PolygonalDomain) -> DomainIndex:
    return DomainIndex(domain)


def _require_inside(domain, *pts):
    for p in pts:
        if locate(domain, p) == "exterior":
            raise PointOutsideDomain(f"point {tuple(p)} is outside the domain")


def geodesic_distance(domain: PolygonalDomain, a, b) -> float:
    """Length of a shortest L1 path from ``a`` to ``b`` inside the domain."""
    _require_inside(domain, a, b)
    idx = get_index(domain)
    if idx.sees(a, b):
        return _l1(a, b)
    return idx.point_distance(idx.label(a), b)[0]


# -- shortest-path maps ----------------------------------------------------

@dataclass(frozen=True)
class Cell:
    root: int
    polygon: object
    quadrant: int | None = None

    @property
    def area(self) -> float:
        return float(self.polygon.area)


@dataclass(frozen=True)
class Bisector:
    roots: tuple[int, int]
    chain: tuple[tuple[float, float], ...]
    kind: str | None = None

    @property
    def segments(self):
        return list(zip(self.chain[:-1], self.chain[1:]))


@dataclass(frozen=True)
class ShortestPathMap:
    domain: PolygonalDomain
    source: Point
    labeling: GeodesicLabeling
    cells: tuple[Cell, ...]
    bisectors: tuple[Bisector, ...]
    empty_roots: tuple[int, ...] = field(default_factory=tuple)

    @property
    def watersheds(self) -> list[Bisector]:
        return [b for b in self.bisectors if b.kind == "watershed"]

    @property
    def vertex_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.root != SOURCE]

    @property
    def source_cell(self):
        return unary_union([c.polygon for c in self.cells if c.root == SOURCE])

    @property
    def quadrant_chords(self) -> list:
        """Axis-parallel chords through the source, clipped to its cell."""
        cell = self.source_cell
        if cell.is_empty:
            return []
        x0, y0, x1, y1 = self.domain.bbox
        zx, zy = self.source
        out = []
        for ln in (LineString([(zx, y0 - 1), (zx, y1 + 1)]),
                   LineString([(x0 - 1, zy), (x1 + 1, zy)])):
            part = cell.intersection(ln)
            if not part.is_empty and part.length > 0:
                out.append(part)
        return out

    def cell_area_sum(self) -> float:
        return float(sum(c.area for c in self.cells))

    def distance(self, p) -> tuple[float, int]:
        return get_index(self.domain).point_distance(self.labeling, p)

    def lookup(self, p) -> tuple[float, int]:
        """Distance through the cell containing ``p``: root label plus L1."""
        sp = SPoint(float(p[0]), float(p[1]))
        for c in self.cells:
            if c.polygon.covers(sp):
                base = 0.0 if c.root == SOURCE else float(self.labeling.dist[c.root])
                rp = self.source if c.root == SOURCE else self.domain.vertices[c.root]
                return base + _l1(rp, p), c.root
        raise PointOutsideDomain(f"point {tuple(p)} is in no cell")


def _snap_poly(coords, grid):
    """Polygon from ``coords`` rounded onto a grid of spacing ``grid``."""
    c = np.round(np.asarray(coords, dtype=float) / grid) * grid
    p = Polygon(c)
    return p if p.is_valid else _polygonal(shapely.make_valid(p))


def _polygonal(g):
    parts = [p for p in shapely.get_parts(g) if p.geom_type == "Polygon" and p.area > 0]
    if len(parts) == 1:
        return parts[0]
    return shapely.MultiPolygon(parts)


def _union(polys):
    g = unary_union(polys)
    if not g.is_valid:
        g = shapely.make_valid(g)
    return _polygonal(g) if g.geom_type not in ("Polygon", "MultiPolygon") else g


def _segment_kind(spm_idx: DomainIndex, lab, a, b, eps) -> str:
    mx, my = 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])
    dx, dy = b[0] - a[0], b[1] - a[1]
    ln = math.hypot(dx, dy)
    nx, ny = -dy / ln, dx / ln
    d0 = spm_idx.point_distance(lab, (mx, my))[0]
    drop = 1e-3 * eps
    sides = []
    for s in (1.0, -1.0):
        q = (mx + s * eps * nx, my + s * eps * ny)
        if locate(spm_idx.domain, q) == "exterior":
            sides.append(True)
            continue
        sides.append(spm_idx.point_distance(lab, q)[0] < d0 - drop)
    return "watershed" if all(sides) else "crossable"


def _check_direction(a, b, scale):
    dx, dy = abs(b[0] - a[0]), abs(b[1] - a[1])
    ln = dx + dy
    if ln <= 1e-6 * scale:
        return
    if min(dx, dy) > 1e-6 * ln and abs(dx - dy) > 1e-6 * ln:
        raise DegenerateBisector(
            f"bisector segment {a} -> {b} is not axis-parallel or diagonal")


def build_spm(domain: PolygonalDomain, source, *, classify: bool = True,
              strict: bool = False) -> ShortestPathMap:
    """Shortest-path map of ``source``.

    Cells are grouped by root (``-1`` is the source, whose cell is kept as up
    to four quadrant cells).  Bisectors are the shared boundaries of cells
    with different roots.  With ``strict`` a bisector segment that is not
    horizontal, vertical or diagonal raises :class:`DegenerateBisector`.
    """
    _require_inside(domain, source)
    idx = get_index(domain)
    lab = idx.label(source)
    _, regions = idx.envelope(lab, collect=True)
    grid = 10.0 ** math.floor(math.log10(1e-10 * max(idx.diam, 1.0)))
    by_root: dict[tuple[int, int | None], list] = {}
    for poly, root, k in regions:
        key = (root, k if root == SOURCE else None)
        by_root.setdefault(key, []).append(_snap_poly(poly, grid))
    cells = []
    for (root, q), polys in sorted(by_root.items(), key=lambda t: (t[0][0], t[0][1] or 0)):
        g = _union(polys)
        if not g.is_empty and g.area > 0:
            cells.append(Cell(root, g, q))
    present = {c.root for c in cells}
    empty = tuple(v for v in range(domain.n) if v not in present)

    merged: dict[int, object] = {}
    for c in cells:
        merged[c.root] = c.polygon if c.root not in merged else _union([merged[c.root], c.polygon])
    bisectors = []
    keys = sorted(merged)
    for i, ra in enumerate(keys):
        ga = merged[ra]
        for rb in keys[i + 1:]:
            gb = merged[rb]
            if not ga.envelope.intersects(gb.envelope):
                continue
            shared = ga.boundary.intersection(gb.boundary)
            lines = [g for g in shapely.get_parts(shared)
                     if g.geom_type == "LineString" and g.length > grid]
            if not lines:
                continue
            m = unary_union(lines)
            if m.geom_type == "MultiLineString":
                m = linemerge(m)
            for ln in shapely.get_parts(m):
                if ln.length <= 10 * grid:
                    continue
                chain = tuple((float(x), float(y)) for x, y in ln.coords)
                if strict:
                    for a, b in zip(chain[:-1], chain[1:]):
                        _check_direction(a, b, idx.diam)
                bisectors.append(Bisector((ra, rb), chain))
    spm = ShortestPathMap(domain, lab.source, lab, tuple(cells), tuple(bisectors), empty)
    return classify_watersheds(spm) if classify else spm


def classify_watersheds(spm: ShortestPathMap) -> ShortestPathMap:
    """Tag every bisector as ``"watershed"`` or ``"crossable"``.

    A segment is a watershed when stepping off it by ``1e-6 * diameter``
    lowers the distance to the source on both sides.  Chains are split where
    the tag changes.
    """
    idx = get_index(spm.domain)
    eps = 1e-6 * max(idx.diam, 1.0)
    out = []
    for b in spm.bisectors:
        run, kind = [b.chain[0]], None
        for a, c in b.segments:
            if math.hypot(c[0] - a[0], c[1] - a[1]) <= 4 * eps:
                k = kind or "crossable"
            else:
                k = _segment_kind(idx, spm.labeling, a, c, eps)
            if kind is not None and k != kind:
                out.append(Bisector(b.roots, tuple(run), kind))
                run = [a]
            run.append(c)
            kind = k
        out.append(Bisector(b.roots, tuple(run), kind or "crossable"))
    return ShortestPathMap(spm.domain, spm.source, spm.labeling, spm.cells, tuple(out),
                           spm.empty_roots)


# -- cardinal areas --------------------------------------------------------

@dataclass(frozen=True)
class CardinalAreas:
    w: float
    e: float
    n: float
    s: float


def _straight_cardinal(domain: PolygonalDomain, Z) -> CardinalAreas:
    poly = domain.shapely()
    x0, y0, x1, y1 = poly.bounds
    pad = 1.0 + max(x1 - x0, y1 - y0)
    zx, zy = float(Z[0]), float(Z[1])
    w = poly.intersection(shapely.box(x0 - pad, y0 - pad, zx, y1 + pad)).area
    s = poly.intersection(shapely.box(x0 - pad, y0 - pad, x1 + pad, zy)).area
    mu = poly.area
    return CardinalAreas(w=w, e=mu - w, n=mu - s, s=s)


def geodesic_sums(domain: PolygonalDomain, Z, backend=None):
    """``(integral of d_G, w, e, s, n, undetermined_x, undetermined_y)``."""
    idx = get_index(domain)
    return idx.envelope(idx.label(Z), backend=backend)


def cardinal_areas(domain: PolygonalDomain, Z, metric: str = "straight") -> CardinalAreas:
    """Areas of the points whose shortest path from ``Z`` starts west, east,
    north or south."""
    _require_inside(domain, Z)
    if metric == "straight":
        return _straight_cardinal(domain, Z)
    _, w, e, s, n, ux, uy = geodesic_sums(domain, Z)
    if ux > 1e-9 * domain.area or uy > 1e-9 * domain.area:
        raise DegeneratePosition(
            f"first move from {tuple(Z)} is ambiguous on an area of {max(ux, uy):.3g}")
    return CardinalAreas(w=w, e=e, n=n, s=s)


# -- bisector motion -------------------------------------------------------

@dataclass(frozen=True)
class BisectorShift:
    roots: tuple[int, int]
    kind: str
    anchor: tuple[float, float]
    displacement: float


def _anchor(chain, scale):
    """Midpoint of the longest non-horizontal segment of a chain."""
    best, out = 0.0, None
    for a, b in zip(chain[:-1], chain[1:]):
        dy = abs(b[1] - a[1])
        if dy > 1e-6 * scale and dy > best:
            best, out = dy, (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))
    return out


def bisector_shift(domain: PolygonalDomain, Z, h: float) -> list[BisectorShift]:
    """Horizontal displacement of every vertex-pair bisector of SPM(Z) when
    the source moves to ``Z + (h, 0)``.

    Each bisector is probed on the horizontal line through the midpoint of
    its longest non-horizontal segment; the displacement is the distance to
    the nearest crossing of the bisector with the same roots in the moved map.
    """
    m0 = build_spm(domain, Z)
    m1 = build_spm(domain, (float(Z[0]) + h, float(Z[1])))
    scale = max(domain.diameter, 1.0)
    moved: dict[tuple[int, int], list] = {}
    for b in m1.bisectors:
        moved.setdefault(tuple(sorted(b.roots)), []).append(LineString(b.chain))
    x0, _, x1, _ = domain.bbox
    out = []
    for b in m0.bisectors:
        key = tuple(sorted(b.roots))
        if SOURCE in key or key not in moved:
            continue
        p = _anchor(b.chain, scale)
        if p is None:
            continue
        probe = LineString([(x0 - 1.0, p[1]), (x1 + 1.0, p[1])])
        xs = [q.x for ln in moved[key] for q in shapely.get_parts(ln.intersection(probe))
              if q.geom_type == "Point"]
        if xs:
            d = min(abs(x - p[0]) for x in xs)
            out.append(BisectorShift(key, b.kind, p, float(d)))
    return out
