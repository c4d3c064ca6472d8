import math

import numpy as np
import pytest
from shapely.geometry import LineString
from shapely.ops import split

from l1median import instances, objective as ob, oracle
from l1median.geom import locate, trapezoidize, validate_domain
from l1median.solver_holes import build_overlay, solve_holes
from l1median.solver_simple import HasHoles, NotATree, median_chord, solve_simple, tree_median
from l1median.solver_straight import (AxisProfile, StraightObjective, dominated_boundary,
                                      l1_origin, solve_straight)

def _staircase(k=7):
    """Band of ``k`` unit columns, each raised by half a unit."""
    bottom = [p for i in range(k) for p in ((i, i / 2), (i + 1, i / 2))]
    top = [p for i in reversed(range(k)) for p in ((i + 1, i / 2 + 1), (i, i / 2 + 1))]
    return [bottom + top]


# -- straight ---------------------------------------------------------------

def test_origin_square(square):
    o = l1_origin(square)
    assert tuple(o.point) == pytest.approx((0.5, 0.5))
    assert o.feasible


def test_origin_lshape(lshape):
    o = l1_origin(lshape)
    assert tuple(o.point) == pytest.approx((0.75, 0.75), abs=1e-12)
    assert o.feasible


def test_origin_holed(holed):
    o = l1_origin(holed)
    assert tuple(o.point) == pytest.approx((2, 2))
    assert not o.feasible


def test_origin_halves_area(rng):
    for _ in range(10):
        d = instances.random_domain(rng)
        o = l1_origin(d)
        for axis, c in (("vertical", o.point.x), ("horizontal", o.point.y)):
            below, _ = AxisProfile(d, axis).below(c)
            assert below == pytest.approx(d.area / 2, abs=1e-9 * d.area)


def test_straight_square(square):
    opt, cands = solve_straight(square)
    assert tuple(opt.point) == pytest.approx((0.5, 0.5))
    assert opt.value == pytest.approx(0.5, abs=1e-14)
    assert opt.provenance == "l1-origin"


def test_straight_holed_ties(holed):
    res = solve_straight(holed)
    assert len(res.ties) >= 4
    for t in res.ties:
        assert locate(holed, t.point) == "boundary"
    best = oracle.grid_search_optimum(holed, "straight", 256)
    assert best.brackets(res.optimum.value)


def test_pruning_does_not_change_answer(rng, holed):
    doms = [holed] + [instances.random_holed(rng, 7, 2) for _ in range(5)]
    for d in doms:
        if l1_origin(d).feasible:
            continue
        a = solve_straight(d, prune=True).optimum.value
        b = solve_straight(d, prune=False).optimum.value
        assert a == pytest.approx(b, abs=1e-9)


def test_outer_boundary_dominated(holed):
    kept = {i for i, *_ in dominated_boundary(holed, l1_origin(holed))}
    assert kept and all(holed.vertex_ring[i] == 1 for i in kept)


def test_parallelogram_hole_two_optima():
    d = validate_domain([[(0, 0), (6, 0), (6, 6), (0, 6)],
                         [(2, 2.2), (3.6, 2.2), (4, 3.8), (2.4, 3.8)]])
    res = solve_straight(d)
    assert len(res.ties) == 2
    a, b = (np.array(t.point) for t in res.ties)
    # point symmetry through the centre
    assert a + b == pytest.approx((6, 6), abs=1e-7)


def test_straight_convex_along_axis_lines(named_domain):
    f = StraightObjective(named_domain)
    x0, y0, x1, y1 = named_domain.bbox
    xs = np.linspace(x0, x1, 41)
    for y in np.linspace(y0, y1, 5):
        v = np.array([f(x, y) for x in xs])
        assert (np.diff(v, 2) >= -1e-9).all()


def test_candidates_feasible(rng):
    for _ in range(8):
        d = instances.random_domain(rng)
        for c in solve_straight(d).candidates:
            assert locate(d, c.point) != "exterior"


def test_straight_matches_exact_evaluator(rng):
    for _ in range(5):
        d = instances.random_domain(rng)
        opt = solve_straight(d).optimum
        assert opt.value == pytest.approx(ob.f_value(d, opt.point), abs=1e-9)


def test_record_format(holed):
    rec = solve_straight(holed).to_record()
    assert rec["metric"] == "l1-straight"
    assert set(rec["optimum"]) >= {"x", "y", "f", "provenance"}
    assert rec["candidates_evaluated"] > 0
    assert rec["l1_origin"]["feasible"] is False


# -- simple -----------------------------------------------------------------

def test_tree_median_square(square):
    assert tree_median(trapezoidize(square)) == 0


def test_tree_median_lshape(lshape):
    t = trapezoidize(lshape)
    assert t.trapezoids[tree_median(t)].area == pytest.approx(2.0)


def _brute_medians(t):
    nb = t.neighbours()
    areas = t.areas
    total = areas.sum()
    out = []
    for m in range(len(areas)):
        ok = True
        for s in nb[m]:
            seen, stack, acc = {m, s}, [s], 0.0
            while stack:
                v = stack.pop()
                acc += areas[v]
                for w in nb[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            ok &= acc <= total / 2 + 1e-12
        if ok:
            out.append(m)
    return out


def test_tree_median_staircase():
    t = trapezoidize(validate_domain(_staircase()))
    assert len(t.trapezoids) == 7
    assert t.areas == pytest.approx(np.full(7, t.areas[0]))
    assert _brute_medians(t) == [tree_median(t)] == [3]


def test_tree_median_random(rng):
    for _ in range(20):
        t = trapezoidize(instances.random_simple(int(rng.integers(4, 30)), rng))
        assert tree_median(t) in _brute_medians(t)


def test_tree_median_rejects_cycle(holed):
    with pytest.raises(NotATree):
        tree_median(trapezoidize(holed))


def test_simple_rejects_holes(holed):
    with pytest.raises(HasHoles):
        solve_simple(holed)


def test_simple_square(square):
    opt = solve_simple(square).optimum
    assert tuple(opt.point) == (0.5, 0.5)
    assert opt.value == pytest.approx(0.5, abs=1e-12)


def test_simple_lshape(lshape):
    res = solve_simple(lshape)
    assert tuple(res.optimum.point) == pytest.approx((0.75, 0.75), abs=1e-9)
    assert res.metric == "l1-geodesic-simple"
    est, err = oracle.integrate_average(lshape, res.optimum.point, "geodesic", 400)
    assert abs(res.optimum.value - est) <= 2e-3


def test_simple_comb_feasible():
    comb = instances.named("comb")
    assert not l1_origin(comb).feasible
    opt = solve_simple(comb).optimum
    assert locate(comb, opt.point) != "exterior"
    # f falls across the whole spine, so the median sits on its top edge
    assert tuple(opt.point) == pytest.approx((3.5, 0.5), abs=1e-12)
    assert opt.value <= ob.f_value(comb, (3.5, 0.4), "geodesic")


def _chord_split(d, c):
    """Areas of the two sides of the median chord inside its trapezoid."""
    tz = trapezoidize(d, c.axis)
    t = tz.trapezoids[c.trapezoid]
    s = (c.coordinate - t.lo) / (t.hi - t.lo)
    lo = t.bottom[0] + s * (t.bottom[1] - t.bottom[0])
    hi = t.top[0] + s * (t.top[1] - t.top[0])
    pad = 1e-9 * d.diameter
    seg = [(c.coordinate, lo - pad), (c.coordinate, hi + pad)]
    if c.axis == "horizontal":
        seg = [(y, x) for x, y in seg]
    parts = split(d.shapely(), LineString(seg)).geoms
    return sorted(p.area for p in parts)


def test_median_chord_halves_area(rng):
    checked = 0
    for _ in range(20):
        d = instances.random_simple(int(rng.integers(4, 30)), rng)
        for axis in ("vertical", "horizontal"):
            c = median_chord(d, axis)
            if c.on_wall:
                continue
            parts = _chord_split(d, c)
            assert len(parts) == 2
            assert parts == pytest.approx([d.area / 2] * 2, abs=1e-9 * d.area)
            checked += 1
    assert checked > 20


def test_simple_equals_straight_on_convex(rng):
    for _ in range(10):
        ang = np.sort(rng.uniform(0, 2 * math.pi, int(rng.integers(3, 9))))
        d = validate_domain([[(math.cos(a), math.sin(a)) for a in ang]])
        s = solve_simple(d).optimum
        t = solve_straight(d).optimum
        assert tuple(s.point) == pytest.approx(tuple(t.point), abs=1e-9)
        assert s.value == pytest.approx(t.value, abs=1e-9)


# -- holes ------------------------------------------------------------------

def test_overlay_euler(two_holes):
    ov = build_overlay(two_holes)
    assert ov.euler(len(two_holes.holes)) == 2
    assert ov.watershed_count > 0
    assert sum(f.area for f in ov.faces) == pytest.approx(two_holes.area, rel=1e-9)


def test_holes_square(square):
    opt = solve_holes(square).optimum
    assert tuple(opt.point) == pytest.approx((0.5, 0.5), abs=1e-9)
    assert opt.value == pytest.approx(0.5, abs=1e-12)


def test_holes_holed_square(holed):
    res = solve_holes(holed)
    assert res.optimum.value == pytest.approx(8 / 3, abs=1e-9)
    assert len(res.ties) >= 4


def test_holes_two_holes_vs_oracle(two_holes):
    res = solve_holes(two_holes)
    best = oracle.grid_search_optimum(two_holes, "geodesic", 128)
    assert best.brackets(res.optimum.value)
    assert locate(two_holes, res.optimum.point) != "exterior"


def test_holes_pruned_equals_exhaustive(two_holes):
    ov = build_overlay(two_holes)
    a = solve_holes(two_holes, overlay=ov).optimum.value
    b = solve_holes(two_holes, overlay=ov, exhaustive=True).optimum.value
    assert a == pytest.approx(b, abs=1e-12)


def test_holes_threads(lshape):
    a = solve_holes(lshape, threads=2)
    b = solve_holes(lshape)
    assert a.optimum == b.optimum


def test_holes_equals_simple(rng):
    for _ in range(3):
        d = instances.random_simple(int(rng.integers(4, 9)), rng)
        assert solve_holes(d).optimum.value == pytest.approx(
            solve_simple(d).optimum.value, abs=1e-9)
