"""The average-distance objective, its gradient and per-cell cubic fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import Point as SPoint, Polygon
from shapely.ops import polylabel

from .geom import EPS_GEOM, PointOutsideDomain, PolygonalDomain, locate
from . import spm

METRICS = ("straight", "geodesic")


class DegenerateTriangle(ValueError):
    pass


class NonHorizontalBase(ValueError):
    pass


class IllConditionedFit(ValueError):
    pass


class CellTooThin(ValueError):
    pass


class OutsideCell(ValueError):
    pass


def _metric(metric: str) -> str:
    m = {"l1-straight": "straight", "l1-geodesic": "geodesic"}.get(metric, metric)
    if m not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    return m


@dataclass(frozen=True)
class ObjectiveValue:
    value: float
    metric: str

    def __float__(self) -> float:
        return self.value


# -- triangles -------------------------------------------------------------

def _mean_abs_offset(xs, ys, ax):
    """Mean of |x - ax| over triangle (xs, ys), exact."""
    tri = [(xs[i], ys[i]) for i in range(3)]
    total = 0.0
    area = abs(0.5 * ((xs[1] - xs[0]) * (ys[2] - ys[0]) - (xs[2] - xs[0]) * (ys[1] - ys[0])))
    lo, hi = min(ys) - 1.0, max(ys) + 1.0
    left, right = min(xs) - 1.0, max(xs) + 1.0
    for sgn in (1.0, -1.0):
        part = Polygon(tri).intersection(
            shapely.box(ax, lo, right, hi) if sgn > 0 else shapely.box(left, lo, ax, hi))
        if part.is_empty or part.area == 0.0:
            continue
        total += sgn * (part.centroid.x - ax) * part.area
    return total / area


def triangle_average(A, B, C) -> float:
    """Mean L1 distance from ``A`` over the triangle ``ABC`` whose side AB is
    horizontal.

    With ``a = |AB|``, ``c`` the height of ``C`` over the base line and ``b``
    the horizontal distance from ``A`` to the foot of that height, the mean
    is ``(a + b + c) / 3`` whenever the foot lies on the same side of ``A``
    as ``B``.  Otherwise the x part is integrated piecewise.
    """
    (ax, ay), (bx, by), (cx, cy) = A, B, C
    scale = max(abs(ax), abs(ay), abs(bx), abs(by), abs(cx), abs(cy), 1.0)
    if abs(by - ay) > EPS_GEOM * scale:
        raise NonHorizontalBase(f"side {A}-{B} is not horizontal")
    a = abs(bx - ax)
    c = abs(cy - ay)
    if a <= EPS_GEOM * scale or c <= EPS_GEOM * scale:
        raise DegenerateTriangle(f"triangle {A}, {B}, {C} has no area")
    b = cx - ax
    if b * (bx - ax) >= 0.0:
        return (a + abs(b) + c) / 3.0
    return _mean_abs_offset((ax, bx, cx), (ay, by, cy), ax) + c / 3.0


def _horizontal_split(tri):
    """Split a triangle at the horizontal through its middle vertex."""
    pts = sorted(tri, key=lambda p: p[1])
    (x0, y0), (x1, y1), (x2, y2) = pts
    if y1 == y0:
        return [((x0, y0), (x1, y1), (x2, y2))]
    if y1 == y2:
        return [((x1, y1), (x2, y2), (x0, y0))]
    t = (y1 - y0) / (y2 - y0)
    xm = x0 + t * (x2 - x0)
    return [((x1, y1), (xm, y1), (x0, y0)), ((x1, y1), (xm, y1), (x2, y2))]


def _straight_integral(domain: PolygonalDomain, Z) -> float:
    zx, zy = float(Z[0]), float(Z[1])
    poly = domain.shapely()
    x0, y0, x1, y1 = poly.bounds
    pad = 1.0 + max(x1 - x0, y1 - y0)
    total = 0.0
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            box = shapely.box(min(zx, zx + sx * pad), min(zy, zy + sy * pad),
                              max(zx, zx + sx * pad), max(zy, zy + sy * pad))
            quad = poly.intersection(box)
            if quad.is_empty or quad.area == 0.0:
                continue
            for tri in shapely.constrained_delaunay_triangles(quad).geoms:
                pts = list(tri.exterior.coords)[:3]
                for t in _horizontal_split(pts):
                    total += _triangle_term(t, zx, zy, sx, sy)
    return total


def _triangle_term(t, zx, zy, sx, sy) -> float:
    """Area times mean L1 distance from Z over a triangle with a horizontal
    side, all of it in quadrant (sx, sy) of Z."""
    (px, py), (qx, qy), (rx, ry) = t
    area = 0.5 * abs((qx - px) * (ry - py) - (rx - px) * (qy - py))
    if area == 0.0:
        return 0.0
    # the horizontal side is the first two points; pick the endpoint nearer Z
    A, B = ((px, py), (qx, qy)) if sx * (px - qx) <= 0 else ((qx, qy), (px, py))
    C = (rx, ry)
    if sy * (C[1] - A[1]) >= 0 and sx * (C[0] - A[0]) >= 0:
        inner = triangle_average(A, B, C)
        return area * (inner + abs(A[0] - zx) + abs(A[1] - zy))
    cx, cy = (px + qx + rx) / 3.0, (py + qy + ry) / 3.0
    return area * (sx * (cx - zx) + sy * (cy - zy))


# -- objective -------------------------------------------------------------

def _require_inside(domain, Z):
    if locate(domain, Z) == "exterior":
        raise PointOutsideDomain(f"point {tuple(Z)} is outside the domain")


def evaluate_f(domain: PolygonalDomain, Z, metric: str = "straight") -> ObjectiveValue:
    """Average L1 distance from ``Z`` to the points of the domain."""
    m = _metric(metric)
    _require_inside(domain, Z)
    if m == "straight":
        integral = _straight_integral(domain, Z)
    else:
        integral = spm.geodesic_sums(domain, Z)[0]
    return ObjectiveValue(integral / domain.area, m)


def f_value(domain: PolygonalDomain, Z, metric: str = "straight") -> float:
    return evaluate_f(domain, Z, metric).value


def gradient_f(domain: PolygonalDomain, Z, metric: str = "straight") -> tuple[float, float]:
    """``((w - e) / mu, (s - n) / mu)`` from the cardinal areas at ``Z``."""
    m = _metric(metric)
    ca = spm.cardinal_areas(domain, Z, m)
    mu = domain.area
    return (ca.w - ca.e) / mu, (ca.s - ca.n) / mu


# -- cubic pieces ----------------------------------------------------------

@dataclass(frozen=True)
class CubicPair:
    """``f(x, y) = f1(x) + f2(y)`` on one cell.

    Coefficients live in a local frame ``u = (x - x0) / h``,
    ``v = (y - y0) / h``; :meth:`global_coefficients` converts them.
    """
    x0: float
    y0: float
    h: float
    ax: tuple[float, float, float, float]
    by: tuple[float, float, float]
    cell: object = None
    residual: float = 0.0

    def _check(self, x, y):
        if self.cell is None:
            return
        tol = 1e-9 * max(self.h, 1.0)
        if self.cell.distance(SPoint(x, y)) > tol:
            raise OutsideCell(f"({x}, {y}) is outside the fitted cell")

    def f1(self, x: float) -> float:
        u = (x - self.x0) / self.h
        a = self.ax
        return a[0] + u * (a[1] + u * (a[2] + u * a[3]))

    def f2(self, y: float) -> float:
        v = (y - self.y0) / self.h
        b = self.by
        return v * (b[0] + v * (b[1] + v * b[2]))

    def __call__(self, x: float, y: float) -> float:
        self._check(x, y)
        return self.f1(x) + self.f2(y)

    def value(self, x: float, y: float) -> float:
        return self.f1(x) + self.f2(y)

    def critical_points(self) -> list[tuple[float, float]]:
        """All combinations of the real roots of ``f1'`` and ``f2'``."""
        xs = _real_roots(self.dfx_poly())
        ys = _real_roots(self.dfy_poly())
        return [(x, y) for x in xs for y in ys]

    def gradient(self, x: float, y: float) -> tuple[float, float]:
        u = (x - self.x0) / self.h
        v = (y - self.y0) / self.h
        a, b = self.ax, self.by
        return ((a[1] + 2 * a[2] * u + 3 * a[3] * u * u) / self.h,
                (b[0] + 2 * b[1] * v + 3 * b[2] * v * v) / self.h)

    def dfx_poly(self) -> np.ndarray:
        """Coefficients (low to high) of f1'(x) in global x."""
        g = self.global_coefficients()
        return np.array([g["ax1"], 2 * g["ax2"], 3 * g["ax3"]])

    def dfy_poly(self) -> np.ndarray:
        g = self.global_coefficients()
        return np.array([g["by1"], 2 * g["by2"], 3 * g["by3"]])

    def global_coefficients(self) -> dict[str, float]:
        """Coefficients of ``f1(x) = ax0 + ax1 x + ax2 x^2 + ax3 x^3`` and
        ``f2(y) = by1 y + by2 y^2 + by3 y^3`` (constant folded into ax0)."""
        P = np.polynomial.Polynomial
        fx = P(self.ax)(P([-self.x0 / self.h, 1.0 / self.h]))
        fy = P((0.0,) + tuple(self.by))(P([-self.y0 / self.h, 1.0 / self.h]))
        cx = np.pad(fx.coef, (0, 4 - len(fx.coef)))
        cy = np.pad(fy.coef, (0, 4 - len(fy.coef)))
        return {"ax0": cx[0] + cy[0], "ax1": cx[1], "ax2": cx[2], "ax3": cx[3],
                "by1": cy[1], "by2": cy[2], "by3": cy[3]}


def _real_roots(low_to_high) -> list[float]:
    c = np.trim_zeros(np.asarray(low_to_high, dtype=float), "b")
    if len(c) < 2:
        return []
    r = np.polynomial.polynomial.polyroots(c)
    return [float(z.real) for z in r if abs(z.imag) <= 1e-9 * max(1.0, abs(z))]


# monomials u^i v^j with i + j <= 3
_MONO = [(i, j) for d in range(4) for j in range(d + 1) for i in (d - j,)]


@dataclass(frozen=True)
class CellCubic:
    """A general bivariate cubic on one cell, in the local frame
    ``u = (x - x0) / h``, ``v = (y - y0) / h``.

    Near holes the objective can carry ``xy`` terms: a bisector hidden
    behind a hole moves along a diagonal as ``Z`` moves, so the west
    area depends on both coordinates.
    """
    x0: float
    y0: float
    h: float
    coef: tuple[float, ...]
    cell: object = None
    residual: float = 0.0

    def _uv(self, x, y):
        return (x - self.x0) / self.h, (y - self.y0) / self.h

    def value(self, x: float, y: float) -> float:
        u, v = self._uv(x, y)
        return float(sum(c * u ** i * v ** j for c, (i, j) in zip(self.coef, _MONO)))

    __call__ = value

    def gradient(self, x: float, y: float) -> tuple[float, float]:
        u, v = self._uv(x, y)
        gx = sum(c * i * u ** (i - 1) * v ** j for c, (i, j) in zip(self.coef, _MONO) if i)
        gy = sum(c * j * u ** i * v ** (j - 1) for c, (i, j) in zip(self.coef, _MONO) if j)
        return float(gx) / self.h, float(gy) / self.h

    @property
    def mixed(self) -> float:
        """Largest ``xy`` coefficient magnitude in the local frame."""
        return max(abs(c) for c, (i, j) in zip(self.coef, _MONO) if i and j)

    def _grad_in_v(self, u):
        """Both partials as polynomials in ``v`` (low to high) at fixed ``u``."""
        px = np.zeros(3)
        py = np.zeros(3)
        for c, (i, j) in zip(self.coef, _MONO):
            if i:
                px[j] += c * i * u ** (i - 1)
            if j:
                py[j - 1] += c * j * u ** i
        return px, py

    def critical_points(self) -> list[tuple[float, float]]:
        """Real solutions of ``grad = 0``.

        The resultant of the two quadratic partials with respect to ``v``
        is a quartic in ``u``; it is interpolated at Chebyshev nodes.
        """
        def res(u):
            a, b = self._grad_in_v(u)
            S = np.array([[a[2], a[1], a[0], 0.0], [0.0, a[2], a[1], a[0]],
                          [b[2], b[1], b[0], 0.0], [0.0, b[2], b[1], b[0]]])
            return np.linalg.det(S)

        nodes = 4.0 * np.cos(np.pi * (np.arange(9) + 0.5) / 9)
        vals = np.array([res(u) for u in nodes])
        scale = max(np.max(np.abs(vals)), 1e-300)
        out = []
        if np.max(np.abs(vals)) > 1e-12 * scale and scale > 1e-300:
            cheb = np.polynomial.Chebyshev.fit(nodes, vals, 4)
            us = [float(z.real) for z in cheb.roots()
                  if abs(z.imag) <= 1e-7 * max(1.0, abs(z))]
        else:
            us = []
        for u in us:
            a, b = self._grad_in_v(u)
            for p in (a, b):
                for v in _real_roots(p):
                    ga, gb = np.polyval(a[::-1], v), np.polyval(b[::-1], v)
                    tol = 1e-7 * max(1.0, np.max(np.abs(a)), np.max(np.abs(b)))
                    if abs(ga) <= tol and abs(gb) <= tol:
                        out.append((self.x0 + self.h * u, self.y0 + self.h * v))
        if not us:
            out.extend(self._newton_starts())
        return out

    def _newton_starts(self):
        out = []
        for su in (-1.0, 0.0, 1.0):
            for sv in (-1.0, 0.0, 1.0):
                x, y = self.x0 + su * self.h, self.y0 + sv * self.h
                for _ in range(30):
                    gx, gy = self.gradient(x, y)
                    e = 1e-6 * self.h
                    hxx = (self.gradient(x + e, y)[0] - self.gradient(x - e, y)[0]) / (2 * e)
                    hxy = (self.gradient(x, y + e)[0] - self.gradient(x, y - e)[0]) / (2 * e)
                    hyy = (self.gradient(x, y + e)[1] - self.gradient(x, y - e)[1]) / (2 * e)
                    det = hxx * hyy - hxy * hxy
                    if det == 0.0:
                        break
                    dx = (hyy * gx - hxy * gy) / det
                    dy = (hxx * gy - hxy * gx) / det
                    x, y = x - dx, y - dy
                    if abs(dx) + abs(dy) < 1e-14 * max(1.0, abs(x) + abs(y)):
                        out.append((x, y))
                        break
        return out


def _design(u, v):
    return np.column_stack([np.ones_like(u), u, u * u, u ** 3, v, v * v, v ** 3])


def sample_layout(cell, rotate: float = 0.0):
    """Seven fit samples and five held-out points inside ``cell``.

    Returns ``(center, radius, fit_pts, check_pts)``.
    """
    c = polylabel(cell, tolerance=1e-6 * math.sqrt(max(cell.area, 1e-300)))
    if not cell.contains(c):
        c = cell.representative_point()
    r = cell.exterior.distance(c)
    for h in getattr(cell, "interiors", []):
        r = min(r, h.distance(c))
    # six of the seven heptagon directions: no two samples are antipodal,
    # which would make the odd columns of the system dependent
    ang = np.radians(15.0 + rotate + 360.0 / 7.0 * np.arange(6))
    fit = np.vstack([[c.x, c.y],
                     np.column_stack([c.x + 0.3 * r * np.cos(ang), c.y + 0.3 * r * np.sin(ang)])])
    ang2 = np.radians(45.0 + rotate + 72.0 * np.arange(5))
    chk = np.column_stack([c.x + 0.5 * r * np.cos(ang2), c.y + 0.5 * r * np.sin(ang2)])
    return (c.x, c.y), r, fit, chk


def fit_cell_cubic(domain: PolygonalDomain, cell, metric: str = "straight", *,
                   evaluator=None, check: bool = True) -> CubicPair:
    """Recover the cubic pair of ``f`` on a face by interpolation.

    ``f`` is evaluated at the cell's pole of inaccessibility and six points
    at 0.3 times the inradius around it; the 7x7 system is solved in a local
    frame.  The residual at five further points is stored on the result.
    """
    m = _metric(metric)
    if not isinstance(cell, Polygon):
        cell = Polygon(cell)
    if evaluator is None:
        def evaluator(p):
            return evaluate_f(domain, p, m).value
    diam = max(domain.diameter, 1.0)
    last_err = None
    for rot in (0.0, 7.0):
        (cx, cy), r, fit, chk = sample_layout(cell, rot)
        if r < 1e-7 * diam:
            raise CellTooThin(f"cell inradius {r:.3g} is below {1e-7 * diam:.3g}")
        h = 0.3 * r
        A = _design((fit[:, 0] - cx) / h, (fit[:, 1] - cy) / h)
        if np.linalg.cond(A) > 1e8:
            last_err = IllConditionedFit("sample points are degenerate")
            continue
        vals = np.array([evaluator(p) for p in fit])
        coef = np.linalg.solve(A, vals)
        res = 0.0
        cp = CubicPair(cx, cy, h, tuple(coef[:4]), tuple(coef[4:]), cell)
        if check:
            got = np.array([evaluator(p) for p in chk])
            pred = np.array([cp.f1(p[0]) + cp.f2(p[1]) for p in chk])
            res = float(np.max(np.abs(got - pred)))
        return CubicPair(cx, cy, h, tuple(coef[:4]), tuple(coef[4:]), cell, res)
    raise last_err


def _full_layout(cell, rotate: float = 0.0):
    (cx, cy), r, fit, chk = sample_layout(cell, rotate)
    ang = np.radians(40.0 + rotate + 120.0 * np.arange(3))
    outer = np.column_stack([cx + 0.6 * r * np.cos(ang), cy + 0.6 * r * np.sin(ang)])
    return (cx, cy), r, np.vstack([fit, outer]), chk


def fit_cell_cubic_full(domain: PolygonalDomain, cell, metric: str = "geodesic", *,
                        evaluator=None, check: bool = True) -> CellCubic:
    """Like :func:`fit_cell_cubic` but without assuming separability:
    ten samples determine all ten coefficients of a bivariate cubic."""
    m = _metric(metric)
    if not isinstance(cell, Polygon):
        cell = Polygon(cell)
    if evaluator is None:
        def evaluator(p):
            return evaluate_f(domain, p, m).value
    diam = max(domain.diameter, 1.0)
    last_err = None
    for rot in (0.0, 7.0):
        (cx, cy), r, fit, chk = _full_layout(cell, rot)
        if r < 1e-7 * diam:
            raise CellTooThin(f"cell inradius {r:.3g} is below {1e-7 * diam:.3g}")
        h = 0.3 * r
        u, v = (fit[:, 0] - cx) / h, (fit[:, 1] - cy) / h
        A = np.column_stack([u ** i * v ** j for i, j in _MONO])
        if np.linalg.cond(A) > 1e8:
            last_err = IllConditionedFit("sample points are degenerate")
            continue
        coef = np.linalg.solve(A, np.array([evaluator(p) for p in fit]))
        cc = CellCubic(cx, cy, h, tuple(map(float, coef)), cell)
        res = 0.0
        if check:
            res = float(max(abs(evaluator(p) - cc.value(*p)) for p in chk))
        return CellCubic(cx, cy, h, tuple(map(float, coef)), cell, res)
    raise last_err
