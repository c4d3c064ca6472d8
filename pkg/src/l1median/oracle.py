"""Brute-force reference values for the average L1 distance.

Everything here is deliberately naive and self-contained: the domain is
rasterised on an ``N x N`` grid, geodesic distances come from a visibility
graph searched with a plain heap-based Dijkstra, and the optimum is the best
grid point.  Only validation and point-in-polygon tests are shared with the
solvers.

Quadrature.  Grid cells that no boundary edge touches are either fully
inside (midpoint rule) or fully outside.  Cells touched by an edge are split
into ``k x k`` sub-cells, each counted when its centre is inside.  Since
``d(Z, .)`` is 1-Lipschitz in L1 on a box contained in the domain, a full
cell of size ``dx x dy`` contributes at most ``(dx + dy) / 4`` times its
area to the error and an untouched sub-cell ``(dx + dy) / (4k)``.  A sub-cell
touched by an edge contributes at most its area times the largest distance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .geom import Point, PointOutsideDomain, PolygonalDomain, inside_mask, locate

METRICS = ("straight", "geodesic")


def _metric(metric: str) -> str:
    m = metric.removeprefix("l1-")
    if m not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    return m


@dataclass(frozen=True)
class GridSpec:
    """Grid resolution ``N`` per axis and the sub-sampling factor used on
    cells touched by the boundary."""
    resolution: int = 256
    supersample: int = 4

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError(f"resolution must be at least 16, got {self.resolution}")
        if self.supersample < 1:
            raise ValueError("supersample must be positive")

    def steps(self, domain: PolygonalDomain) -> tuple[float, float]:
        x0, y0, x1, y1 = domain.bbox
        return (x1 - x0) / self.resolution, (y1 - y0) / self.resolution

    def slack(self, domain: PolygonalDomain) -> float:
        """L1 length of a cell diagonal."""
        dx, dy = self.steps(domain)
        return dx + dy


@dataclass(frozen=True)
class OracleOptimum:
    point: Point
    value: float
    error_bound: float
    slack: float
    evaluations: int

    @property
    def lower(self) -> float:
        """Lower bound on the true optimum value."""
        return self.value - self.slack - self.error_bound

    @property
    def upper(self) -> float:
        return self.value + self.error_bound

    def brackets(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def __iter__(self):
        yield self.point
        yield self.value

    def to_record(self, digits: int = 12) -> dict:
        r = lambda v: float(f"{v:.{digits}g}")  # noqa: E731
        return {"point": {"x": r(self.point.x), "y": r(self.point.y)}, "value": r(self.value),
                "error_bound": r(self.error_bound), "slack": r(self.slack),
                "bracket": [r(self.lower), r(self.upper)], "evaluations": self.evaluations}


# -- visibility -------------------------------------------------------------

def _proper_crossings(a, b, E) -> bool:
    ax, ay = a
    bx, by = b
    cx, cy, dx, dy = E[:, 0], E[:, 1], E[:, 2], E[:, 3]
    o1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    o2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
    o3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
    o4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
    return bool(np.any((o1 * o2 < 0) & (o3 * o4 < 0)))


def segment_inside(domain: PolygonalDomain, a, b) -> bool:
    """Whether the closed segment ``ab`` lies in the (closed) domain.

    The segment is cut at every vertex lying on it; each piece must be free
    of proper crossings and have its midpoint in the domain.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if _proper_crossings(a, b, domain.edges):
        return False
    d = b - a
    L2 = float(d @ d)
    if L2 == 0.0:
        return locate(domain, a) != "exterior"
    V = domain.vertices
    rel = V - a
    cross = rel[:, 0] * d[1] - rel[:, 1] * d[0]
    t = (rel @ d) / L2
    tol = 1e-12 * max(domain.diameter, 1.0) * math.sqrt(L2)
    on = (np.abs(cross) <= tol) & (t > 1e-12) & (t < 1 - 1e-12)
    ts = np.concatenate([[0.0], np.sort(t[on]), [1.0]])
    for t0, t1 in zip(ts[:-1], ts[1:]):
        if locate(domain, a + 0.5 * (t0 + t1) * d) == "exterior":
            return False
    return True


def _field(domain: PolygonalDomain, src, pts: np.ndarray) -> np.ndarray:
    """L1 distance from ``src`` to each point it sees, ``inf`` otherwise."""
    d = kernels.visible_l1_field(float(src[0]), float(src[1]), pts, domain.edges)
    # segments passing exactly through a vertex may slip into a hole without
    # properly crossing an edge; recheck those slowly
    sx, sy = float(src[0]), float(src[1])
    suspect = kernels.grazing_mask(sx, sy, pts, domain.vertices, 1e-12 * max(domain.diameter, 1.0))
    for i in np.flatnonzero(suspect & np.isfinite(d)):
        if not segment_inside(domain, (sx, sy), pts[i]):
            d[i] = np.inf
    return d


def _dijkstra(adj: np.ndarray, start: int) -> np.ndarray:
    n = len(adj)
    dist = np.full(n, np.inf)
    dist[start] = 0.0
    heap = [(0.0, start)]
    done = np.zeros(n, dtype=bool)
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v in np.flatnonzero(np.isfinite(adj[u])):
            nd = du + adj[u, v]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, int(v)))
    return dist


# -- quadrature grid --------------------------------------------------------

def _mark_touched(domain: PolygonalDomain, x0, y0, hx, hy, M) -> np.ndarray:
    """Boolean ``(M, M)`` array of fine cells met by some boundary edge
    (index ``[ix, iy]``); slightly conservative at cell borders."""
    touched = np.zeros((M, M), dtype=bool)
    eps = 1e-9
    for ax, ay, bx, by in domain.edges:
        ua, va = (ax - x0) / hx, (ay - y0) / hy
        ub, vb = (bx - x0) / hx, (by - y0) / hy
        lo, hi = min(ua, ub), max(ua, ub)
        i0 = max(int(math.floor(lo - eps)), 0)
        i1 = min(int(math.floor(hi + eps)), M - 1)
        for i in range(i0, i1 + 1):
            s, e = max(i, lo), min(i + 1, hi)
            if ub == ua:
                vs, ve = va, vb
            else:
                vs = va + (s - ua) * (vb - va) / (ub - ua)
                ve = va + (e - ua) * (vb - va) / (ub - ua)
            j0 = max(int(math.floor(min(vs, ve) - eps)), 0)
            j1 = min(int(math.floor(max(vs, ve) + eps)), M - 1)
            touched[i, j0:j1 + 1] = True
    return touched


class OracleGrid:
    """Quadrature points, weights and per-point error coefficients."""

    def __init__(self, domain: PolygonalDomain, spec: GridSpec):
        self.domain = domain
        self.spec = spec
        N, k = spec.resolution, spec.supersample
        x0, y0, _, _ = domain.bbox
        dx, dy = spec.steps(domain)
        self.dx, self.dy = dx, dy
        fine = _mark_touched(domain, x0, y0, dx / k, dy / k, N * k)
        straddle = fine.reshape(N, k, N, k).any(axis=(1, 3))

        ix, iy = np.nonzero(~straddle)
        cx, cy = x0 + (ix + 0.5) * dx, y0 + (iy + 0.5) * dy
        keep = inside_mask(domain, cx, cy)
        pts = [np.column_stack([cx[keep], cy[keep]])]
        wts = [np.full(keep.sum(), dx * dy)]
        lip = [np.full(keep.sum(), 0.25 * (dx + dy))]

        sx, sy = np.nonzero(straddle)
        a, b = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
        fx = (sx[:, None] * k + a.ravel()[None, :]).ravel()
        fy = (sy[:, None] * k + b.ravel()[None, :]).ravel()
        ccx, ccy = x0 + (fx + 0.5) * dx / k, y0 + (fy + 0.5) * dy / k
        hit = fine[fx, fy]
        keep = inside_mask(domain, ccx, ccy)
        sub_area = dx * dy / (k * k)
        pts.append(np.column_stack([ccx[keep], ccy[keep]]))
        wts.append(np.full(keep.sum(), sub_area))
        lip.append(np.where(hit[keep], 0.0, 0.25 * (dx + dy) / k))

        self.points = np.vstack(pts)
        self.weights = np.concatenate(wts)
        self.lipschitz = float(np.concatenate(lip) @ self.weights)
        self.touched_area = float(hit.sum() * sub_area)
        self.mu = domain.area
        self.scale = float(self.weights.sum()) / self.mu

    def __len__(self):
        return len(self.points)


class Oracle:
    """Grid oracle for one domain, metric and grid."""

    def __init__(self, domain: PolygonalDomain, metric: str, spec: GridSpec):
        self.domain = domain
        self.metric = _metric(metric)
        self.grid = OracleGrid(domain, spec)
        self._vfield = None
        self._adj = None
        self._dv = None

    def _vertex_graph(self):
        if self._adj is None:
            V = self.domain.vertices
            n = len(V)
            adj = np.full((n, n), np.inf)
            for i in range(n):
                for j in range(i + 1, n):
                    if segment_inside(self.domain, V[i], V[j]):
                        adj[i, j] = adj[j, i] = float(np.abs(V[i] - V[j]).sum())
            self._adj = adj
            self._dv = np.array([_dijkstra(adj, i) for i in range(n)])
        return self._adj, self._dv

    def _vertex_fields(self) -> np.ndarray:
        if self._vfield is None:
            pts = self.grid.points
            self._vfield = np.array([_field(self.domain, v, pts) for v in self.domain.vertices])
        return self._vfield

    def vertex_distances(self, Z) -> np.ndarray:
        """Geodesic distance from ``Z`` to every vertex (Dijkstra with ``Z``
        added to the visibility graph)."""
        adj, _ = self._vertex_graph()
        V = self.domain.vertices
        n = len(V)
        full = np.full((n + 1, n + 1), np.inf)
        full[:n, :n] = adj
        for i, v in enumerate(V):
            if segment_inside(self.domain, Z, v):
                full[n, i] = full[i, n] = float(np.abs(V[i] - Z).sum())
        return _dijkstra(full, n)[:n]

    def distances(self, Z) -> np.ndarray:
        """``d(Z, p)`` for every quadrature point ``p``."""
        Z = np.asarray(Z, dtype=float)
        pts = self.grid.points
        if self.metric == "straight":
            return np.abs(pts[:, 0] - Z[0]) + np.abs(pts[:, 1] - Z[1])
        direct = _field(self.domain, Z, pts)
        dz = self.vertex_distances(Z)
        via = (dz[:, None] + self._vertex_fields()).min(axis=0)
        return np.minimum(direct, via)

    def _bound(self, dmax: float) -> float:
        g = self.grid
        return (g.lipschitz + g.touched_area * (dmax + g.dx + g.dy)) / g.mu

    def integrate(self, Z) -> tuple[float, float, np.ndarray]:
        d = self.distances(Z)
        if not np.all(np.isfinite(d)):
            raise RuntimeError(f"unreachable quadrature points from {tuple(Z)}")
        return float(self.grid.weights @ d) / self.grid.mu, self._bound(float(d.max())), d

    def search(self, *, seeds: int = 32, tol: float = 0.0) -> OracleOptimum:
        """Exact minimum of the grid estimate over all quadrature points.

        Branch and bound: the estimate is Lipschitz with constant
        ``sum(weights) / mu`` in the oracle's own distance, so an evaluated
        point ``Z`` bounds every other point ``P`` below by
        ``est(Z) - c d(Z, P)``.
        """
        pts = self.grid.points
        m = len(pts)
        lb = np.full(m, -np.inf)
        done = np.zeros(m, dtype=bool)
        best, best_i, dmax = np.inf, -1, 0.0
        queue = list(np.unique(np.linspace(0, m - 1, min(seeds, m)).astype(int)))
        c = self.grid.scale
        evals = 0
        while True:
            if queue:
                j = int(queue.pop())
                if done[j]:
                    continue
            else:
                j = int(np.argmin(np.where(done, np.inf, lb)))
                if done[j] or lb[j] >= best - tol:
                    break
            est, _, d = self.integrate(pts[j])
            evals += 1
            done[j] = True
            dmax = max(dmax, float(d.max()))
            if est < best:
                best, best_i = est, j
            np.maximum(lb, est - c * d, out=lb)
        bp = pts[best_i]
        return OracleOptimum(Point(float(bp[0]), float(bp[1])), best,
                             self._bound(dmax) + tol, self.grid.spec.slack(self.domain), evals)


@lru_cache(maxsize=8)
def _oracle(domain: PolygonalDomain, metric: str, spec: GridSpec) -> Oracle:
    return Oracle(domain, metric, spec)


def integrate_average(domain: PolygonalDomain, Z, metric: str = "straight",
                      grid: GridSpec | int = 256) -> tuple[float, float]:
    """Grid estimate of ``f(Z)`` and a bound on its quadrature error."""
    spec = grid if isinstance(grid, GridSpec) else GridSpec(int(grid))
    if locate(domain, Z) == "exterior":
        raise PointOutsideDomain(f"{tuple(Z)} is outside the domain")
    est, err, _ = _oracle(domain, _metric(metric), spec).integrate(Z)
    return est, err


def grid_search_optimum(domain: PolygonalDomain, metric: str = "straight",
                        grid: GridSpec | int = 256, *, tol: float | None = None) -> OracleOptimum:
    """Best grid point and the two-sided bracket on the true optimum.

    The search stops once no unvisited grid point can beat the best estimate
    by more than ``tol`` (default: the grid slack); ``tol`` is added to the
    error bound, so the bracket stays valid.
    """
    spec = grid if isinstance(grid, GridSpec) else GridSpec(int(grid))
    if tol is None:
        tol = spec.slack(domain)
    return _oracle(domain, _metric(metric), spec).search(tol=tol)
