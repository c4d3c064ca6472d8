# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_kernels_py``."""

from libc.math cimport fabs, sqrt, INFINITY
import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF MAXV = 256
DEF MAXPARTS = 64

cdef double SX[4]
cdef double SY[4]
SX[:] = [-1.0, -1.0, 1.0, 1.0]
SY[:] = [-1.0, 1.0, -1.0, 1.0]


cdef int clip(double* px, double* py, int n, double a, double b, double c,
              double* ox, double* oy) nogil:
    cdef int i, m = 0
    cdef double x0, y0, v0, x1, y1, v1, t
    if n == 0:
        return 0
    x0 = px[n - 1]
    y0 = py[n - 1]
    v0 = a * x0 + b * y0 - c
    for i in range(n):
        x1 = px[i]
        y1 = py[i]
        v1 = a * x1 + b * y1 - c
        if v1 <= 0.0:
            if v0 > 0.0:
                t = v0 / (v0 - v1)
                ox[m] = x0 + t * (x1 - x0)
                oy[m] = y0 + t * (y1 - y0)
                m += 1
            ox[m] = x1
            oy[m] = y1
            m += 1
        elif v0 <= 0.0:
            t = v0 / (v0 - v1)
            ox[m] = x0 + t * (x1 - x0)
            oy[m] = y0 + t * (y1 - y0)
            m += 1
        x0 = x1
        y0 = y1
        v0 = v1
    return m


cdef void moments(double* px, double* py, int n, double* out) nogil:
    cdef int i, j
    cdef double A = 0.0, Mx = 0.0, My = 0.0, cr
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        cr = px[i] * py[j] - px[j] * py[i]
        A += cr
        Mx += (px[i] + px[j]) * cr
        My += (py[i] + py[j]) * cr
    out[0] = 0.5 * A
    out[1] = Mx / 6.0
    out[2] = My / 6.0


cdef bint proper_cross(double ax, double ay, double bx, double by,
                       double[:, ::1] edges) nogil:
    cdef Py_ssize_t i
    cdef double cx, cy, dx, dy, o1, o2, o3, o4
    for i in range(edges.shape[0]):
        cx = edges[i, 0]
        cy = edges[i, 1]
        dx = edges[i, 2]
        dy = edges[i, 3]
        o1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        o2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
        if o1 * o2 >= 0.0:
            continue
        o3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
        o4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
        if o3 * o4 < 0.0:
            return True
    return False


cdef bint segment_hits(double* px, double* py, int n, double x0, double y0,
                       double x1, double y1, double eps) nogil:
    cdef double t0 = 0.0, t1 = 1.0, dx = x1 - x0, dy = y1 - y0
    cdef double ax, ay, ex, ey, num, den, t
    cdef int i, j
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        ax = px[i]
        ay = py[i]
        ex = px[j] - ax
        ey = py[j] - ay
        num = ex * (y0 - ay) - ey * (x0 - ax)
        den = ex * dy - ey * dx
        if fabs(den) < 1e-300:
            if num < eps * sqrt(ex * ex + ey * ey):
                return False
            continue
        t = -num / den
        if den > 0:
            if t > t0:
                t0 = t
        else:
            if t < t1:
                t1 = t
        if t1 - t0 <= 0.0:
            return False
    return (t1 - t0) * sqrt(dx * dx + dy * dy) > eps


def envelope_pass(double[:, ::1] coords, long[::1] offsets, double[:, ::1] consts,
                  double[:, :, ::1] dirs, long[:, ::1] roots, source,
                  double[:, ::1] windows, double[:, ::1] edges, double tol,
                  bint collect=False):
    if collect:
        raise NotImplementedError("region collection is only in the Python kernel")
    cdef double total = 0.0, w = 0.0, e = 0.0, s = 0.0, nn = 0.0, ux = 0.0, uy = 0.0
    cdef bint has_src = source is not None
    cdef double zx = 0.0, zy = 0.0
    if has_src:
        zx = float(source[0])
        zy = float(source[1])
    cdef Py_ssize_t P = offsets.shape[0] - 1
    cdef Py_ssize_t p, i, wi
    cdef int npart, np2, m, k, j, q, cnt, nr
    cdef double bx0, bx1, by0, by1, span, eps, a, b, c
    cdef double mom[3]
    cdef double cst[4]
    cdef double drx[4]
    cdef double dry[4]
    cdef int active[4]
    cdef int nact
    cdef double cx, cy, sx, sy, cz, rx0, ry0
    # part storage: MAXPARTS polygons of up to MAXV vertices
    cdef double[:, ::1] partx = np.empty((MAXPARTS, MAXV))
    cdef double[:, ::1] party = np.empty((MAXPARTS, MAXV))
    cdef double[:, ::1] tmpx = np.empty((MAXPARTS, MAXV))
    cdef double[:, ::1] tmpy = np.empty((MAXPARTS, MAXV))
    cdef int[::1] plen = np.empty(MAXPARTS, dtype=np.intc)
    cdef int[::1] tlen = np.empty(MAXPARTS, dtype=np.intc)
    cdef double[::1] rx = np.empty(MAXV)
    cdef double[::1] ry = np.empty(MAXV)
    cdef double[::1] rx2 = np.empty(MAXV)
    cdef double[::1] ry2 = np.empty(MAXV)
    cdef int rn
    with nogil:
        for p in range(P):
            m = <int>(offsets[p + 1] - offsets[p])
            if m > MAXV // 2:
                with gil:
                    raise ValueError("piece has too many vertices")
            for i in range(m):
                partx[0, i] = coords[offsets[p] + i, 0]
                party[0, i] = coords[offsets[p] + i, 1]
            plen[0] = m
            npart = 1
            if has_src:
                bx0 = partx[0, 0]
                bx1 = bx0
                by0 = party[0, 0]
                by1 = by0
                for i in range(m):
                    if partx[0, i] < bx0: bx0 = partx[0, i]
                    if partx[0, i] > bx1: bx1 = partx[0, i]
                    if party[0, i] < by0: by0 = party[0, i]
                    if party[0, i] > by1: by1 = party[0, i]
                span = bx1 - bx0
                if by1 - by0 > span:
                    span = by1 - by0
                if span < 1.0:
                    span = 1.0
                eps = 1e-12 * span
                for wi in range(windows.shape[0]):
                    if (max(windows[wi, 0], windows[wi, 2]) < bx0
                            or min(windows[wi, 0], windows[wi, 2]) > bx1
                            or max(windows[wi, 1], windows[wi, 3]) < by0
                            or min(windows[wi, 1], windows[wi, 3]) > by1):
                        continue
                    a = windows[wi, 3] - windows[wi, 1]
                    b = -(windows[wi, 2] - windows[wi, 0])
                    c = a * windows[wi, 0] + b * windows[wi, 1]
                    np2 = 0
                    for q in range(npart):
                        if (plen[q] >= 3 and np2 + 2 <= MAXPARTS and segment_hits(
                                &partx[q, 0], &party[q, 0], plen[q],
                                windows[wi, 0], windows[wi, 1], windows[wi, 2], windows[wi, 3], eps)):
                            tlen[np2] = clip(&partx[q, 0], &party[q, 0], plen[q], a, b, c,
                                             &tmpx[np2, 0], &tmpy[np2, 0])
                            if tlen[np2] >= 3:
                                np2 += 1
                            tlen[np2] = clip(&partx[q, 0], &party[q, 0], plen[q], -a, -b, -c,
                                             &tmpx[np2, 0], &tmpy[np2, 0])
                            if tlen[np2] >= 3:
                                np2 += 1
                        elif np2 < MAXPARTS:
                            for i in range(plen[q]):
                                tmpx[np2, i] = partx[q, i]
                                tmpy[np2, i] = party[q, i]
                            tlen[np2] = plen[q]
                            np2 += 1
                    for q in range(np2):
                        for i in range(tlen[q]):
                            partx[q, i] = tmpx[q, i]
                            party[q, i] = tmpy[q, i]
                        plen[q] = tlen[q]
                    npart = np2
                for k in range(2):
                    if k == 0:
                        if not (bx0 < zx < bx1):
                            continue
                        a = 1.0
                        b = 0.0
                        c = zx
                    else:
                        if not (by0 < zy < by1):
                            continue
                        a = 0.0
                        b = 1.0
                        c = zy
                    np2 = 0
                    for q in range(npart):
                        if np2 + 2 > MAXPARTS:
                            break
                        tlen[np2] = clip(&partx[q, 0], &party[q, 0], plen[q], a, b, c,
                                         &tmpx[np2, 0], &tmpy[np2, 0])
                        if tlen[np2] >= 3:
                            np2 += 1
                        tlen[np2] = clip(&partx[q, 0], &party[q, 0], plen[q], -a, -b, -c,
                                         &tmpx[np2, 0], &tmpy[np2, 0])
                        if tlen[np2] >= 3:
                            np2 += 1
                    for q in range(np2):
                        for i in range(tlen[q]):
                            partx[q, i] = tmpx[q, i]
                            party[q, i] = tmpy[q, i]
                        plen[q] = tlen[q]
                    npart = np2
            for q in range(npart):
                moments(&partx[q, 0], &party[q, 0], plen[q], mom)
                if mom[0] <= 0.0:
                    continue
                for k in range(4):
                    cst[k] = consts[p, k]
                    drx[k] = dirs[p, k, 0]
                    dry[k] = dirs[p, k, 1]
                if has_src:
                    cx = mom[1] / mom[0]
                    cy = mom[2] / mom[0]
                    if not proper_cross(zx, zy, cx, cy, edges):
                        sx = 1.0 if cx > zx else -1.0
                        sy = 1.0 if cy > zy else -1.0
                        k = (2 if sx > 0 else 0) + (1 if sy > 0 else 0)
                        cz = -(sx * zx + sy * zy)
                        if cz < cst[k] - tol:
                            cst[k] = cz
                            drx[k] = sx
                            dry[k] = sy
                nact = 0
                for k in range(4):
                    if cst[k] < INFINITY:
                        active[nact] = k
                        nact += 1
                for cnt in range(nact):
                    k = active[cnt]
                    rn = plen[q]
                    for i in range(rn):
                        rx[i] = partx[q, i]
                        ry[i] = party[q, i]
                    for nr in range(nact):
                        j = active[nr]
                        if j == k:
                            continue
                        rn = clip(&rx[0], &ry[0], rn, SX[k] - SX[j], SY[k] - SY[j],
                                  cst[j] - cst[k], &rx2[0], &ry2[0])
                        for i in range(rn):
                            rx[i] = rx2[i]
                            ry[i] = ry2[i]
                        if rn < 3:
                            break
                    if rn < 3:
                        continue
                    moments(&rx[0], &ry[0], rn, mom)
                    if mom[0] <= 0.0:
                        continue
                    total += cst[k] * mom[0] + SX[k] * mom[1] + SY[k] * mom[2]
                    if drx[k] < 0:
                        w += mom[0]
                    elif drx[k] > 0:
                        e += mom[0]
                    else:
                        ux += mom[0]
                    if dry[k] < 0:
                        s += mom[0]
                    elif dry[k] > 0:
                        nn += mom[0]
                    else:
                        uy += mom[0]
    return (total, w, e, s, nn, ux, uy)


def visible_l1_field(double zx, double zy, double[:, ::1] pts, double[:, ::1] edges):
    cdef Py_ssize_t K = pts.shape[0], i
    out_arr = np.empty(K)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(K):
            if proper_cross(zx, zy, pts[i, 0], pts[i, 1], edges):
                out[i] = INFINITY
            else:
                out[i] = fabs(pts[i, 0] - zx) + fabs(pts[i, 1] - zy)
    return out_arr


def grazing_mask(double zx, double zy, double[:, ::1] pts, double[:, ::1] verts, double tol):
    cdef Py_ssize_t K = pts.shape[0], n = verts.shape[0], i, j
    cdef double px, py, L, rx, ry, cr, dt
    out_arr = np.zeros(K, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    with nogil:
        for i in range(K):
            px = pts[i, 0] - zx
            py = pts[i, 1] - zy
            L = sqrt(px * px + py * py)
            for j in range(n):
                rx = verts[j, 0] - zx
                ry = verts[j, 1] - zy
                if rx == 0.0 and ry == 0.0:
                    continue
                cr = rx * py - ry * px
                dt = rx * px + ry * py
                if fabs(cr) <= tol * L and dt > 0.0 and dt < L * L:
                    out[i] = 1
                    break
    return out_arr.view(bool)
