import os
import subprocess
import sys

import numpy as np
import pytest

from l1median import instances, kernels, spm

needs_c = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")


def _grid(domain, n=40):
    x0, y0, x1, y1 = domain.bbox
    X, Y = np.meshgrid(np.linspace(x0, x1, n), np.linspace(y0, y1, n))
    return np.column_stack([X.ravel(), Y.ravel()])


@needs_c
def test_visible_field_parity(two_holes):
    pts = _grid(two_holes)
    E = np.ascontiguousarray(two_holes.edges)
    for Z in [(0.5, 0.5), (4.0, 2.0), (7.2, 3.1)]:
        a = kernels.visible_l1_field(*Z, pts, E, backend="cython")
        b = kernels.visible_l1_field(*Z, pts, E, backend="python")
        assert np.array_equal(np.isinf(a), np.isinf(b))
        fin = np.isfinite(a)
        assert np.allclose(a[fin], b[fin], rtol=0, atol=1e-12)


@needs_c
def test_grazing_mask_parity(holed):
    pts = _grid(holed)
    V = np.ascontiguousarray(holed.vertices)
    for Z in [(0.5, 0.5), (0.5, 2.0), (3.5, 3.5)]:
        a = kernels.grazing_mask(*Z, pts, V, 1e-9, backend="cython")
        b = kernels.grazing_mask(*Z, pts, V, 1e-9, backend="python")
        assert np.array_equal(np.asarray(a, bool), np.asarray(b, bool))


@needs_c
def test_envelope_parity(rng):
    for _ in range(4):
        d = instances.random_holed(rng, 7, 2)
        idx = spm.get_index(d)
        x0, y0, x1, y1 = d.bbox
        while True:
            Z = (rng.uniform(x0, x1), rng.uniform(y0, y1))
            if d.shapely().contains(__import__("shapely").Point(Z)):
                break
        a = spm.geodesic_sums(d, Z, backend="cython")
        b = spm.geodesic_sums(d, Z, backend="python")
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_pure_fallback_selected():
    env = dict(os.environ, L1MEDIAN_PURE="1")
    out = subprocess.run([sys.executable, "-c",
                          "from l1median import kernels, objective, instances;"
                          "d = instances.named('holed_square');"
                          "print(kernels.BACKEND, objective.f_value(d, (3, 2), 'geodesic'))"],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out[0] == "python"
    assert float(out[1]) == pytest.approx(8 / 3, abs=1e-9)


def test_clip_halfplane_square():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    # keep x <= 0.25
    half = kernels.clip_halfplane(sq, 1.0, 0.0, 0.25)
    area, mx, my = kernels.moments(half)
    assert (area, mx, my) == pytest.approx((0.25, 0.25 ** 2 / 2, 0.125))
