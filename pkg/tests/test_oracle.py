import ast
from pathlib import Path

import pytest

import l1median
from l1median import instances, objective as ob, oracle
from l1median.geom import PointOutsideDomain
from l1median.oracle import GridSpec, grid_search_optimum, integrate_average
from l1median.solver_simple import solve_simple
from l1median.solver_straight import solve_straight

SRC = Path(l1median.__file__).parent


@pytest.mark.parametrize("Z, want", [((0.5, 0.5), 0.5), ((0, 0), 1.0)])
def test_unit_square(square, Z, want):
    est, err = integrate_average(square, Z, "straight", 200)
    assert abs(est - want) <= 0.01
    assert abs(est - want) <= err


def test_triangle_corner():
    est, err = integrate_average(instances.named("triangle"), (0, 0), "straight", 400)
    assert abs(est - 2.0) <= 0.01
    assert abs(est - 2.0) <= err


def test_geodesic_matches_exact(rng, two_holes):
    for Z in [(0.5, 0.5), (4.0, 2.0), (7.5, 3.5)]:
        est, err = integrate_average(two_holes, Z, "l1-geodesic", 256)
        assert abs(est - ob.f_value(two_holes, Z, "geodesic")) <= err


def test_convergence(square):
    Z = (1 / 3, 1 / 3)
    exact = ob.f_value(square, Z)
    e1 = abs(integrate_average(square, Z, "straight", 64)[0] - exact)
    e2 = abs(integrate_average(square, Z, "straight", 128)[0] - exact)
    assert e1 / e2 >= 1.8


def test_outside_raises(holed):
    with pytest.raises(PointOutsideDomain):
        integrate_average(holed, (2, 2), "geodesic", 64)


def test_unknown_metric(square):
    with pytest.raises(ValueError):
        integrate_average(square, (0.5, 0.5), "euclid", 64)


def test_grid_spec_minimum():
    with pytest.raises(ValueError):
        GridSpec(8)


def test_search_square(square):
    best = grid_search_optimum(square, "straight", 64)
    assert abs(best.point.x - 0.5) + abs(best.point.y - 0.5) <= GridSpec(64).slack(square)
    assert abs(best.value - 0.5) <= 0.03
    assert best.brackets(0.5)


def test_search_lshape(lshape):
    best = grid_search_optimum(lshape, "geodesic", 128)
    slack = GridSpec(128).slack(lshape)
    assert abs(best.point.x - 0.75) + abs(best.point.y - 0.75) <= slack
    assert best.brackets(solve_simple(lshape).optimum.value)


def test_search_holed_straight(holed):
    best = grid_search_optimum(holed, "straight", 256)
    assert best.brackets(solve_straight(holed).optimum.value)
    lo, hi = best.to_record()["bracket"]
    assert lo < hi


def test_unpacking(square):
    point, value = grid_search_optimum(square, "straight", 32)
    assert value == pytest.approx(0.5, abs=0.05)


def test_segment_inside(holed):
    assert oracle.segment_inside(holed, (0.5, 0.5), (3.5, 0.5))
    assert not oracle.segment_inside(holed, (0.5, 2), (3.5, 2))
    # sliding along the hole's edge stays inside the closed domain
    assert oracle.segment_inside(holed, (0.5, 1), (3.5, 1))


def _imports(path):
    tree = ast.parse(path.read_text())
    out = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            out.add(node.module or "")
            out.update(a.name for a in node.names)
        elif isinstance(node, ast.Import):
            out.update(a.name for a in node.names)
    return out


def test_oracle_is_independent():
    used = _imports(SRC / "oracle.py")
    for mod in ("spm", "objective", "solver_straight", "solver_simple", "solver_holes"):
        assert mod not in used
    text = (SRC / "spm.py").read_text()
    assert "visible_l1_field" not in text and "grazing_mask" not in text
