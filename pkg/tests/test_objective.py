import numpy as np
import pytest
from shapely.geometry import Polygon

from l1median import instances, objective as ob, oracle, spm
from l1median.geom import PointOutsideDomain, locate
from l1median.solver_holes import build_overlay


def interior_points(domain, rng, k):
    x0, y0, x1, y1 = domain.bbox
    out = []
    while len(out) < k:
        p = (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
        if locate(domain, p) == "interior":
            out.append(p)
    return out


@pytest.mark.parametrize("A, B, C, want", [
    ((0, 0), (3, 0), (1, 2), 2.0),
    ((0, 0), (1, 0), (0, 1), 2 / 3),
    ((0, 0), (2, 0), (1, 1), 4 / 3),
])
def test_triangle_average(A, B, C, want):
    assert ob.triangle_average(A, B, C) == pytest.approx(want, abs=1e-14)


def test_triangle_average_brute_force():
    # 10^6 midpoints of a fine grid over the bounding box
    n = 1000
    u = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(2 * u, u)
    inside = Y <= np.minimum(X, 2 - X)
    brute = (X[inside] + Y[inside]).mean()
    assert ob.triangle_average((0, 0), (2, 0), (1, 1)) == pytest.approx(brute, abs=1e-3)


def test_triangle_average_errors():
    with pytest.raises(ob.DegenerateTriangle):
        ob.triangle_average((0, 0), (1, 0), (2, 0))
    with pytest.raises(ob.NonHorizontalBase):
        ob.triangle_average((0, 0), (1, 1), (0, 2))


@pytest.mark.parametrize("Z, want", [((0.5, 0.5), 0.5), ((0, 0), 1.0)])
def test_f_unit_square(square, Z, want):
    assert ob.f_value(square, Z) == pytest.approx(want, abs=1e-14)
    # corner sources are nudged a hair inside
    assert ob.f_value(square, Z, "geodesic") == pytest.approx(want, abs=1e-9)


def test_f_holed_matches_oracle(holed):
    f = ob.f_value(holed, (0, 2), "geodesic")
    est, err = oracle.integrate_average(holed, (0, 2), "geodesic", 400)
    assert abs(f - est) <= 2e-3
    assert abs(f - est) <= err


def test_f_outside_raises(holed):
    with pytest.raises(PointOutsideDomain):
        ob.f_value(holed, (2, 2))


def test_objective_value_bounds(rng, named_domain):
    diam_l1 = sum(np.ptp(named_domain.vertices, axis=0))
    for Z in interior_points(named_domain, rng, 3):
        v = ob.evaluate_f(named_domain, Z, "geodesic")
        assert 0 <= float(v)
        assert v.metric == "geodesic"
        assert ob.f_value(named_domain, Z) <= float(v) + 1e-12
        assert float(v) <= 2 * diam_l1


@pytest.mark.parametrize("Z, want", [((0.75, 0.5), (0.5, 0.0)), ((0.5, 0.5), (0.0, 0.0))])
def test_gradient_examples(square, Z, want):
    assert ob.gradient_f(square, Z) == pytest.approx(want, abs=1e-14)


@pytest.mark.parametrize("metric", ["straight", "geodesic"])
def test_gradient_fd(rng, metric):
    h = 1e-5
    for _ in range(6):
        d = instances.random_domain(rng, 10, 1)
        Z = interior_points(d, rng, 1)[0]
        try:
            gx, gy = ob.gradient_f(d, Z, metric)
        except spm.DegeneratePosition:
            continue
        fx = (ob.f_value(d, (Z[0] + h, Z[1]), metric) - ob.f_value(d, (Z[0] - h, Z[1]), metric)) / (2 * h)
        fy = (ob.f_value(d, (Z[0], Z[1] + h), metric) - ob.f_value(d, (Z[0], Z[1] - h), metric)) / (2 * h)
        assert (gx, gy) == pytest.approx((fx, fy), abs=1e-4)


@pytest.mark.parametrize("metric", ["straight", "geodesic"])
def test_lipschitz(rng, two_holes, metric):
    pts = interior_points(two_holes, rng, 20)
    for a, b in zip(pts[::2], pts[1::2]):
        df = abs(ob.f_value(two_holes, a, metric) - ob.f_value(two_holes, b, metric))
        if metric == "straight":
            assert df <= abs(a[0] - b[0]) + abs(a[1] - b[1]) + 1e-12
        else:
            assert df <= spm.geodesic_distance(two_holes, a, b) + 1e-12


def test_fit_unit_square(square):
    cp = ob.fit_cell_cubic(square, Polygon(square.outer))
    g = cp.global_coefficients()
    assert g["ax2"] == pytest.approx(1.0, abs=1e-9)
    assert g["ax3"] == pytest.approx(0.0, abs=1e-9)
    assert g["by2"] == pytest.approx(1.0, abs=1e-9)
    assert g["by3"] == pytest.approx(0.0, abs=1e-9)
    assert g["ax1"] == pytest.approx(-1.0, abs=1e-9)
    assert g["by1"] == pytest.approx(-1.0, abs=1e-9)
    # both per-axis constants 1/2 land in ax0
    assert g["ax0"] == pytest.approx(1.0, abs=1e-9)
    assert cp.residual <= 1e-8


def test_fit_third_derivative_from_slopes():
    d = instances.named("triangle")
    cell = Polygon([(1.2, 0.1), (1.8, 0.1), (1.8, 0.6), (1.2, 0.6)])
    cp = ob.fit_cell_cubic(d, cell)
    # f_xxx = (2 / mu) * sum(top slope - bottom slope); for x in (1, 3) that is -1
    assert 6 * cp.global_coefficients()["ax3"] == pytest.approx(2 / d.area * -1.0, abs=1e-8)


def test_fit_outside_cell_raises(square):
    cell = Polygon([(0, 0), (0.5, 0), (0.5, 0.5), (0, 0.5)])
    cp = ob.fit_cell_cubic(square, cell)
    cp(0.25, 0.25)
    with pytest.raises(ob.OutsideCell):
        cp(0.9, 0.9)


def test_fit_too_thin(square):
    with pytest.raises(ob.CellTooThin):
        ob.fit_cell_cubic(square, Polygon([(0, 0), (1, 0), (1, 1e-12), (0, 1e-12)]))


def test_fit_lines_are_cubic(lshape):
    cp = ob.fit_cell_cubic(lshape, Polygon([(0, 0), (1, 0), (1, 1), (0, 1)]), "geodesic")
    for y in (0.2, 0.7):
        xs = np.linspace(0.1, 0.9, 9)
        vals = [ob.f_value(lshape, (x, y), "geodesic") for x in xs]
        fit = np.polyfit(xs, vals, 3)
        assert np.max(np.abs(np.polyval(fit, xs) - vals)) <= 1e-8
        assert np.max(np.abs([cp(x, y) for x in xs] - np.array(vals))) <= 1e-8


def test_full_fit_on_non_separable_face(two_holes):
    ov = build_overlay(two_holes)
    worst = 0.0
    mixed = 0.0
    for face in ov.faces:
        try:
            cc = ob.fit_cell_cubic_full(two_holes, face, "geodesic")
        except (ob.CellTooThin, ob.IllConditionedFit):
            continue
        worst = max(worst, cc.residual)
        fxy = cc.coef[ob._MONO.index((1, 1))] / cc.h ** 2
        mixed = max(mixed, abs(fxy))
    assert worst <= 1e-8
    # the objective near holes couples x and y
    assert mixed > 1e-2


def test_cell_cubic_critical_points():
    # f = (u - 1)^2 + (v + 0.5)^2 + u v  has one minimum
    coef = [0.0] * 10
    idx = {m: k for k, m in enumerate(ob._MONO)}
    coef[idx[(0, 0)]] = 1.25
    coef[idx[(1, 0)]] = -2.0
    coef[idx[(2, 0)]] = 1.0
    coef[idx[(0, 1)]] = 1.0
    coef[idx[(0, 2)]] = 1.0
    coef[idx[(1, 1)]] = 1.0
    cc = ob.CellCubic(0.0, 0.0, 1.0, tuple(coef))
    pts = cc.critical_points()
    # 2u - 2 + v = 0, 2v + 1 + u = 0
    want = np.linalg.solve([[2, 1], [1, 2]], [2, -1])
    assert any(np.allclose(p, want, atol=1e-9) for p in pts)
    for p in pts:
        assert np.allclose(cc.gradient(*p), 0.0, atol=1e-8)


def test_cubic_pair_critical_points(square):
    cp = ob.fit_cell_cubic(square, Polygon(square.outer))
    pts = cp.critical_points()
    assert any(np.allclose(p, (0.5, 0.5), atol=1e-9) for p in pts)
