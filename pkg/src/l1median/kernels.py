"""Kernel selection: compiled extension when built, pure Python otherwise.

Set ``L1MEDIAN_PURE=1`` in the environment to force the Python path.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_c = None
if not os.environ.get("L1MEDIAN_PURE"):
    try:
        from . import _kernels as _c
        BACKEND = "cython"
    except ImportError:
        _c = None

clip_halfplane = _kernels_py.clip_halfplane
moments = _kernels_py.moments
CLASS_SIGNS = _kernels_py.CLASS_SIGNS
class_of = _kernels_py.class_of


def envelope_pass(coords, offsets, consts, dirs, roots, source, windows, edges,
                  tol=0.0, collect=False, backend=None):
    use = backend or BACKEND
    if collect or use == "python" or _c is None:
        return _kernels_py.envelope_pass(coords, offsets, consts, dirs, roots, source,
                                         windows, edges, tol, collect)
    return _c.envelope_pass(
        np.ascontiguousarray(coords, dtype=np.float64),
        np.ascontiguousarray(offsets, dtype=np.int_),
        np.ascontiguousarray(consts, dtype=np.float64),
        np.ascontiguousarray(dirs, dtype=np.float64),
        np.ascontiguousarray(roots, dtype=np.int_),
        source,
        np.ascontiguousarray(windows, dtype=np.float64).reshape(-1, 4),
        np.ascontiguousarray(edges, dtype=np.float64).reshape(-1, 4),
        float(tol))


def visible_l1_field(zx, zy, pts, edges, backend=None):
    use = backend or BACKEND
    if use == "python" or _c is None:
        return _kernels_py.visible_l1_field(zx, zy, pts, edges)
    return _c.visible_l1_field(float(zx), float(zy),
                               np.ascontiguousarray(pts, dtype=np.float64),
                               np.ascontiguousarray(edges, dtype=np.float64))


def grazing_mask(zx, zy, pts, verts, tol, backend=None):
    use = backend or BACKEND
    if use == "python" or _c is None:
        return _kernels_py.grazing_mask(zx, zy, pts, verts, tol)
    return _c.grazing_mask(float(zx), float(zy),
                           np.ascontiguousarray(pts, dtype=np.float64),
                           np.ascontiguousarray(verts, dtype=np.float64), float(tol))
