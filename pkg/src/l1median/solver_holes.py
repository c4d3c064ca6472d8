"""Geodesic L1 median of a polygon with holes.

The domain is cut by the watershed chains of the shortest-path maps of all
vertices, by the boundary, and by the axis lines through every vertex.
Inside each face of that overlay the objective is a bivariate cubic,
recovered by interpolation; its critical points, the critical points along
each face edge and the overlay vertices are the candidates.

Faces are visited best-first under a Lipschitz bound: a face lies inside a
convex piece of the domain, so ``f`` changes by at most the L1 distance
between two of its points.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LineString, Point as SPoint, Polygon
from shapely.ops import polygonize, unary_union
from shapely.prepared import prep

from .geom import Point, PolygonalDomain, locate
from .objective import CellCubic, CellTooThin, IllConditionedFit, fit_cell_cubic_full
from .solver_straight import TIE_TOL, Candidate, SolveResult, _quadratic_roots, finish
from . import spm


@dataclass(frozen=True)
class OverlaySubdivision:
    """Arrangement of watershed chains, boundary and vertex axis lines.

    ``segments`` are the input segments before noding; ``edges`` are the
    noded pieces inside the domain and ``vertices`` their endpoints.
    """
    segments: tuple
    faces: tuple
    edges: tuple
    vertices: tuple
    watershed_count: int
    components: int = 1
    sources: tuple = field(default_factory=tuple)

    @property
    def complexity(self) -> int:
        return len(self.faces) + len(self.edges) + len(self.vertices)

    def euler(self, n_holes: int) -> int:
        """V - E + F counting hole faces and the unbounded face."""
        return len(self.vertices) - len(self.edges) + len(self.faces) + n_holes + 1


def _components(edges) -> int:
    parent: dict = {}

    def find(a):
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(a) for a in list(parent)})


def watershed_segments(domain: PolygonalDomain, threads: int = 1
                       ) -> list[tuple[tuple[float, float], tuple[float, float], int]]:
    """Every watershed segment of SPM(v) over all vertices ``v``."""
    def one(v):
        return spm.build_spm(domain, tuple(domain.vertices[v])).watersheds

    spm.get_index(domain)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            maps = list(pool.map(one, range(domain.n)))
    else:
        maps = [one(v) for v in range(domain.n)]
    return [(a, c, v) for v, ws in enumerate(maps) for b in ws for a, c in b.segments]


def _reach_boundary(a, c, boundary, reach):
    """Push endpoints lying on the boundary slightly past it, so that
    noding cuts the boundary edge there instead of leaving a dangle."""
    a, c = np.asarray(a, dtype=float), np.asarray(c, dtype=float)
    d = c - a
    ln = float(np.hypot(*d))
    if ln == 0.0:
        return tuple(a), tuple(c)
    d /= ln
    if boundary.distance(SPoint(*a)) < reach:
        a = a - reach * d
    if boundary.distance(SPoint(*c)) < reach:
        c = c + reach * d
    return tuple(map(float, a)), tuple(map(float, c))


def build_overlay(domain: PolygonalDomain, *, extra_lines=(), threads: int = 1) -> OverlaySubdivision:
    """Planar subdivision on which the geodesic objective is cubic per face."""
    diam = max(domain.diameter, 1.0)
    grid = 10.0 ** math.floor(math.log10(1e-9 * diam))
    x0, y0, x1, y1 = domain.bbox
    pad = 0.01 * diam
    ws = watershed_segments(domain, threads)
    segs = [((e[0], e[1]), (e[2], e[3])) for e in domain.edges]
    boundary = domain.shapely().boundary
    reach = 1e-7 * diam
    segs += [_reach_boundary(a, c, boundary, reach) for a, c, _ in ws]
    for x in np.unique(domain.vertices[:, 0]):
        segs.append(((x, y0 - pad), (x, y1 + pad)))
    for y in np.unique(domain.vertices[:, 1]):
        segs.append(((x0 - pad, y), (x1 + pad, y)))
    segs += [tuple(map(tuple, s)) for s in extra_lines]
    lines = shapely.set_precision(
        shapely.MultiLineString([list(s) for s in segs]), grid)
    noded = unary_union(lines)
    poly = domain.shapely()
    pp = prep(poly.buffer(grid))
    faces = []
    for f in polygonize(noded):
        if f.area <= 0.0:
            continue
        if poly.contains(f.representative_point()):
            faces.append(shapely.geometry.polygon.orient(f, 1.0))
    edges = []
    verts: dict = {}
    for ln in shapely.get_parts(noded):
        cs = list(ln.coords)
        for a, b in zip(cs[:-1], cs[1:]):
            mid = SPoint(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))
            if pp.contains(mid) and a != b:
                edges.append((a, b))
                verts.setdefault(a, len(verts))
                verts.setdefault(b, len(verts))
    comp = _components([(verts[a], verts[b]) for a, b in edges])
    return OverlaySubdivision(tuple(segs), tuple(faces), tuple(edges), tuple(verts), len(ws),
                              comp, tuple(sorted({v for *_, v in ws})))


# -- candidates ------------------------------------------------------------

def _face_bound(face, c) -> float:
    xs, ys = np.asarray(face.exterior.coords).T
    return float(np.max(np.abs(xs - c[0]) + np.abs(ys - c[1])))


def face_candidates(cp: CellCubic, face, diam: float) -> list[tuple[Point, str, int | None, float | None]]:
    """Interior critical points, edge critical points and corners of a face."""
    out = []
    pf = prep(face)
    inner_tol = 1e-9 * diam
    for x, y in cp.critical_points():
        p = SPoint(x, y)
        if pf.contains(p) and face.exterior.distance(p) > inner_tol:
            out.append((Point(float(x), float(y)), "face-interior", None, None))
    cs = list(face.exterior.coords)
    for k, (a, b) in enumerate(zip(cs[:-1], cs[1:])):
        out.append((Point(float(a[0]), float(a[1])), "overlay-vertex", None, None))
        dx, dy = b[0] - a[0], b[1] - a[1]
        # the directional derivative along the edge is quadratic in t
        ts = (0.0, 0.5, 1.0)
        vals = []
        for t in ts:
            gx, gy = cp.gradient(a[0] + t * dx, a[1] + t * dy)
            vals.append(gx * dx + gy * dy)
        c2, c1, c0 = np.polyfit(ts, vals, 2)
        for t in _quadratic_roots(c0, c1, c2):
            if 1e-12 < t < 1 - 1e-12:
                out.append((Point(a[0] + t * dx, a[1] + t * dy), "face-edge", k, float(t)))
    return out


def solve_holes(domain: PolygonalDomain, *, overlay: OverlaySubdivision | None = None,
                exhaustive: bool = False, check_fits: bool = False,
                tie_tol: float = TIE_TOL, threads: int = 1) -> SolveResult:
    """Geodesic L1 median of a domain that may have holes.

    With ``exhaustive`` every face is fitted; otherwise faces whose
    Lipschitz lower bound exceeds the best value found are skipped.
    """
    ov = overlay or build_overlay(domain, threads=threads)
    idx = spm.get_index(domain)
    diam = max(domain.diameter, 1.0)
    mu = domain.area
    cache: dict = {}

    def f(p):
        key = (float(p[0]), float(p[1]))
        if key not in cache:
            cache[key] = spm.geodesic_sums(domain, key)[0] / mu
        return cache[key]

    heap = []
    for i, face in enumerate(ov.faces):
        c = face.representative_point()
        fc = f((c.x, c.y))
        heapq.heappush(heap, (fc - _face_bound(face, (c.x, c.y)), i, fc))
    best = min(h[2] for h in heap)
    cands: list[Candidate] = []
    fits: dict[int, CellCubic] = {}
    thin = []
    slack = 1e-9 * max(best, 1.0)
    while heap:
        lb, i, fc = heapq.heappop(heap)
        if not exhaustive and lb > best + slack:
            break
        face = ov.faces[i]
        try:
            cp = fit_cell_cubic_full(domain, face, "geodesic", evaluator=f, check=check_fits)
        except (CellTooThin, IllConditionedFit):
            thin.append(i)
            for x, y in list(face.exterior.coords)[:-1]:
                v = f((x, y))
                cands.append(Candidate(Point(x, y), v, "overlay-vertex"))
                best = min(best, v)
            continue
        fits[i] = cp
        local = []
        for p, prov, k, t in face_candidates(cp, face, diam):
            local.append((cp.value(*p), p, prov, k, t))
        local.sort(key=lambda r: r[0])
        lo = local[0][0]
        for val, p, prov, k, t in local:
            if val <= lo + 1e-7 * max(abs(lo), 1.0) or val <= best + 1e-7:
                val = f(p)
            cands.append(Candidate(p, val, prov, k, t))
            best = min(best, val)
    res = finish("l1-geodesic", cands, diam, tie_tol,
                 {"overlay": {"faces": len(ov.faces), "edges": len(ov.edges),
                              "vertices": len(ov.vertices), "watersheds": ov.watershed_count,
                              "faces_fitted": len(fits), "thin_faces": len(thin)}},
                 {"fits": fits, "overlay": ov})
    return res
