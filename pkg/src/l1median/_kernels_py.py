"""Pure-Python implementations of the hot loops.

These are the reference versions; ``_kernels.pyx`` mirrors them line for
line.  ``l1median.kernels`` picks whichever is importable.
"""

from __future__ import annotations

import math

import numpy as np

INF = math.inf

# class k <-> gradient (sx, sy) of the L1 distance to a root
CLASS_SIGNS = ((-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0))


def class_of(sx: float, sy: float) -> int:
    return (2 if sx > 0 else 0) + (1 if sy > 0 else 0)


def clip_halfplane(poly, a, b, c):
    """Keep the part of convex ``poly`` where ``a*x + b*y <= c``."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    px, py = poly[-1]
    pv = a * px + b * py - c
    for qx, qy in poly:
        qv = a * qx + b * qy - c
        if qv <= 0.0:
            if pv > 0.0:
                t = pv / (pv - qv)
                out.append((px + t * (qx - px), py + t * (qy - py)))
            out.append((qx, qy))
        elif pv <= 0.0:
            t = pv / (pv - qv)
            out.append((px + t * (qx - px), py + t * (qy - py)))
        px, py, pv = qx, qy, qv
    return out


def moments(poly):
    """Return (area, integral of x, integral of y) for a CCW polygon."""
    A = Mx = My = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        cr = x0 * y1 - x1 * y0
        A += cr
        Mx += (x0 + x1) * cr
        My += (y0 + y1) * cr
    return 0.5 * A, Mx / 6.0, My / 6.0


def _proper_cross(ax, ay, bx, by, edges) -> bool:
    for cx, cy, dx, dy in edges:
        o1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        o2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
        if o1 * o2 >= 0.0:
            continue
        o3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
        o4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
        if o3 * o4 < 0.0:
            return True
    return False


def _segment_hits_polygon(poly, x0, y0, x1, y1, eps) -> bool:
    """Does segment (x0,y0)-(x1,y1) pass through the interior of convex poly?"""
    t0, t1 = 0.0, 1.0
    dx, dy = x1 - x0, y1 - y0
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        # inside is left of a->b: cross(b-a, p-a) >= 0
        ex, ey = bx - ax, by - ay
        num = ex * (y0 - ay) - ey * (x0 - ax)
        den = ex * dy - ey * dx
        if abs(den) < 1e-300:
            if num < eps * math.hypot(ex, ey):
                return False
            continue
        t = -num / den
        if den > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t1 - t0 <= 0.0:
            return False
    return (t1 - t0) * math.hypot(dx, dy) > eps


def _split(poly, a, b, c):
    return clip_halfplane(poly, a, b, c), clip_halfplane(poly, -a, -b, -c)


def envelope_pass(coords, offsets, consts, dirs, roots, source, windows, edges,
                  tol, collect=False):
    """Integrate the geodesic distance over a set of convex pieces.

    Parameters
    ----------
    coords, offsets
        CSR layout of convex CCW pieces.
    consts : (P, 4) array
        Per piece and gradient class, the smallest ``D(v) - a_k . v`` over
        the visible vertices of that class (``inf`` when none).
    dirs : (P, 4, 2) array
        First-move direction (sign of x, sign of y) of each class winner.
    roots : (P, 4) int array
        Winning vertex per class (only used when ``collect``).
    source : (x, y) or None
        Free source point.  When given, pieces are split by its windows and
        axis lines and the source competes as an extra root where visible.
    windows : (W, 4) array
        Window segments of the source's visibility polygon.
    edges : (E, 4) array
        Domain edges, for the source visibility test.

    Returns ``(integral, w, e, s, n, undetermined_x, undetermined_y)`` and,
    when ``collect``, a list of ``(polygon, root, class)`` regions where
    ``root == -1`` marks the source.
    """
    total = w = e = s = n = ux = uy = 0.0
    regions = [] if collect else None
    edge_list = [tuple(r) for r in edges]
    win_list = [tuple(r) for r in windows]
    P = len(offsets) - 1
    for p in range(P):
        piece = [(float(coords[i, 0]), float(coords[i, 1]))
                 for i in range(offsets[p], offsets[p + 1])]
        parts = [piece]
        if source is not None:
            zx, zy = source
            xs = [q[0] for q in piece]
            ys = [q[1] for q in piece]
            bx0, bx1, by0, by1 = min(xs), max(xs), min(ys), max(ys)
            span = max(bx1 - bx0, by1 - by0)
            eps = 1e-12 * max(span, 1.0)
            for (wx0, wy0, wx1, wy1) in win_list:
                if (max(wx0, wx1) < bx0 or min(wx0, wx1) > bx1
                        or max(wy0, wy1) < by0 or min(wy0, wy1) > by1):
                    continue
                nxt = []
                for part in parts:
                    if len(part) >= 3 and _segment_hits_polygon(part, wx0, wy0, wx1, wy1, eps):
                        a, b = wy1 - wy0, -(wx1 - wx0)
                        c = a * wx0 + b * wy0
                        for half in _split(part, a, b, c):
                            if len(half) >= 3:
                                nxt.append(half)
                    else:
                        nxt.append(part)
                parts = nxt
            if bx0 < zx < bx1:
                parts = [h for part in parts for h in _split(part, 1.0, 0.0, zx) if len(h) >= 3]
            if by0 < zy < by1:
                parts = [h for part in parts for h in _split(part, 0.0, 1.0, zy) if len(h) >= 3]
        for part in parts:
            A, Mx, My = moments(part)
            if A <= 0.0:
                continue
            cst = [float(consts[p, k]) for k in range(4)]
            dr = [(float(dirs[p, k, 0]), float(dirs[p, k, 1])) for k in range(4)]
            rt = [int(roots[p, k]) for k in range(4)]
            if source is not None:
                cx, cy = Mx / A, My / A
                if not _proper_cross(zx, zy, cx, cy, edge_list):
                    sx = 1.0 if cx > zx else -1.0
                    sy = 1.0 if cy > zy else -1.0
                    k = class_of(sx, sy)
                    cz = -(sx * zx + sy * zy)
                    if cz < cst[k] - tol:
                        cst[k] = cz
                        dr[k] = (sx, sy)
                        rt[k] = -1
            active = [k for k in range(4) if cst[k] < INF]
            for k in active:
                ak = CLASS_SIGNS[k]
                reg = part
                for j in active:
                    if j == k:
                        continue
                    aj = CLASS_SIGNS[j]
                    reg = clip_halfplane(reg, ak[0] - aj[0], ak[1] - aj[1], cst[j] - cst[k])
                    if len(reg) < 3:
                        break
                if len(reg) < 3:
                    continue
                a_, mx, my = moments(reg)
                if a_ <= 0.0:
                    continue
                total += cst[k] * a_ + ak[0] * mx + ak[1] * my
                dx, dy = dr[k]
                if dx < 0:
                    w += a_
                elif dx > 0:
                    e += a_
                else:
                    ux += a_
                if dy < 0:
                    s += a_
                elif dy > 0:
                    n += a_
                else:
                    uy += a_
                if collect:
                    regions.append((reg, rt[k], k))
    out = (total, w, e, s, n, ux, uy)
    if collect:
        return out, regions
    return out


def visible_l1_field(zx, zy, pts, edges):
    """L1 distance from (zx, zy) to each point, ``inf`` where the straight
    segment properly crosses a domain edge."""
    px = pts[:, 0]
    py = pts[:, 1]
    blocked = np.zeros(len(pts), dtype=bool)
    for cx, cy, dx, dy in edges:
        o1 = (px - zx) * (cy - zy) - (py - zy) * (cx - zx)
        o2 = (px - zx) * (dy - zy) - (py - zy) * (dx - zx)
        o3 = (dx - cx) * (zy - cy) - (dy - cy) * (zx - cx)
        o4 = (dx - cx) * (py - cy) - (dy - cy) * (px - cx)
        blocked |= (o1 * o2 < 0.0) & (o3 * o4 < 0.0)
    d = np.abs(px - zx) + np.abs(py - zy)
    d[blocked] = np.inf
    return d


def grazing_mask(zx, zy, pts, verts, tol):
    """Points whose segment from (zx, zy) passes through a vertex strictly
    between its ends."""
    px, py = pts[:, 0] - zx, pts[:, 1] - zy
    L = np.hypot(px, py)
    out = np.zeros(len(pts), dtype=bool)
    for ux, uy in verts:
        rx, ry = ux - zx, uy - zy
        if rx == 0.0 and ry == 0.0:
            continue
        cross = rx * py - ry * px
        dot = rx * px + ry * py
        out |= (np.abs(cross) <= tol * L) & (dot > 0) & (dot < L * L)
    return out
