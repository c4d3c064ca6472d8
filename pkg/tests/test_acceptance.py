"""Acceptance gates.

Each ``criterion_k`` returns an :class:`Outcome`; the pytest wrappers assert
on it and the conftest hook prints one line per gate after the run.  Run the
file directly for the same report without pytest.
"""

from __future__ import annotations

import math
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np
import pytest
from shapely.geometry import Point as SPoint, box

from l1median import instances, objective as ob, oracle, spm
from l1median.geom import locate, validate_domain
from l1median.solver_holes import build_overlay, solve_holes
from l1median.solver_simple import solve_simple
from l1median.solver_straight import solve_straight

SEED = 1729

# pinned tolerances
C1_COUNT, C1_GRID, C1_REL, C1_SECONDS = 100, 400, 1e-2, 10.0
C2_COUNT, C2_STEP, C2_TOL = 50, 1e-5, 1e-4
C3_REL = 1e-8
C4_COUNT, C4_MAX_N = 100, 40
C5_COUNT, C5_MAX_N, C5_HOLES, C5_GRID, C5_SECONDS = 20, 14, 2, 256, 300.0
C6_TOL, C6_COUNT = 1e-9, 10
C7_EXACT, C7_LSHAPE = 1e-12, 1e-9
C8_COUNT, C8_H, C8_REL = 10, 1e-4, 0.05
C9_SIZES, C9_POLYS, C9_REPEATS = (10, 20, 40, 80), 5, 3

NAMED = ("unit_square", "l_shape", "holed_square", "triangle", "two_holes", "comb")


@dataclass
class Outcome:
    passed: bool
    detail: str


REPORT: dict[int, Outcome] = {}


def _rng(k):
    return np.random.default_rng(SEED + k)


def _interior(domain, rng):
    x0, y0, x1, y1 = domain.bbox
    while True:
        p = (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
        if locate(domain, p) == "interior":
            return p


# -- criteria ----------------------------------------------------------------

def criterion_1() -> Outcome:
    """Triangle averages against grid integration."""
    rng = _rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(C1_COUNT):
        ax, ay = rng.uniform(-5, 5, 2)
        a = rng.uniform(0.5, 5)
        b = rng.uniform(-3, 6)
        c = rng.uniform(0.5, 5) * rng.choice([-1, 1])
        A, B, C = (ax, ay), (ax + a, ay), (ax + b, ay + c)
        est, _ = oracle.integrate_average(validate_domain([[A, B, C]]), A, "straight", C1_GRID)
        v = ob.triangle_average(A, B, C)
        worst = max(worst, abs(v - est) / v)
    dt = time.perf_counter() - t0
    ok = worst <= C1_REL and dt < C1_SECONDS
    return Outcome(ok, f"{C1_COUNT} triangles, worst rel err {worst:.2e} (<= {C1_REL:g}), "
                       f"{dt:.1f}s (< {C1_SECONDS:g}s)")


def _near_critical(domain, Z, margin):
    v = domain.vertices
    return bool(np.any(np.abs(v[:, 0] - Z[0]) < margin) or np.any(np.abs(v[:, 1] - Z[1]) < margin))


def criterion_2() -> Outcome:
    """Analytic gradient against central differences."""
    rng = _rng(2)
    h = C2_STEP
    parts, ok = [], True
    for metric in ("straight", "geodesic"):
        worst, done, skipped = 0.0, 0, 0
        while done < C2_COUNT:
            d = instances.random_domain(rng, C5_MAX_N, C5_HOLES)
            Z = _interior(d, rng)
            # the stencil must not straddle a kink at a vertex coordinate or
            # leave the domain
            if (_near_critical(d, Z, 1e3 * h)
                    or d.shapely().boundary.distance(SPoint(Z)) < 1e3 * h):
                skipped += 1
                continue
            try:
                g = ob.gradient_f(d, Z, metric)
            except spm.DegeneratePosition:
                skipped += 1
                continue
            f = lambda x, y: ob.f_value(d, (x, y), metric)  # noqa: E731
            fd = ((f(Z[0] + h, Z[1]) - f(Z[0] - h, Z[1])) / (2 * h),
                  (f(Z[0], Z[1] + h) - f(Z[0], Z[1] - h)) / (2 * h))
            worst = max(worst, abs(g[0] - fd[0]), abs(g[1] - fd[1]))
            done += 1
        ok &= worst <= C2_TOL
        parts.append(f"{metric}: {done} points ({skipped} redrawn), worst {worst:.1e}")
    return Outcome(ok, "; ".join(parts) + f" (<= {C2_TOL:g})")


def _grid_faces(domain):
    """Cells of the axis-line grid through all vertices, clipped to the domain."""
    xs = np.unique(domain.vertices[:, 0])
    ys = np.unique(domain.vertices[:, 1])
    poly = domain.shapely()
    out = []
    for x0, x1 in zip(xs[:-1], xs[1:]):
        for y0, y1 in zip(ys[:-1], ys[1:]):
            g = poly.intersection(box(x0, y0, x1, y1))
            out.extend(p for p in getattr(g, "geoms", [g])
                       if p.geom_type == "Polygon" and p.area > 0)
    return out


def criterion_3() -> Outcome:
    """Separable cubic per face: residual at five held-out points."""
    worst, where, faces, thin = 0.0, "", 0, 0
    for name in NAMED:
        d = instances.named(name)
        for metric, cells in (("straight", _grid_faces(d)),
                              ("geodesic", build_overlay(d).faces)):
            for cell in cells:
                try:
                    cp = ob.fit_cell_cubic(d, cell, metric)
                except (ob.CellTooThin, ob.IllConditionedFit):
                    thin += 1
                    continue
                faces += 1
                scale = max(abs(cp.f1(cp.x0) + cp.f2(cp.y0)), 1.0)
                r = cp.residual / scale
                if r > worst:
                    worst, where = r, f"{name}/{metric}"
    ok = worst <= C3_REL
    return Outcome(ok, f"{faces} faces ({thin} too thin), worst residual {worst:.1e}·f-scale "
                       f"on {where} (<= {C3_REL:g})")


def criterion_4() -> Outcome:
    """The simple-polygon median is never exterior."""
    rng = _rng(4)
    bad = 0
    for _ in range(C4_COUNT):
        d = instances.random_simple(int(rng.integers(4, C4_MAX_N + 1)), rng)
        p = solve_simple(d, with_value=False).optimum.point
        bad += locate(d, p) == "exterior"
    return Outcome(bad == 0, f"{C4_COUNT} polygons, {bad} exterior results")


def criterion_5() -> Outcome:
    """Every solver lands inside the oracle's two-sided bracket."""
    rng = _rng(5)
    t0 = time.perf_counter()
    parts, ok = [], True
    runs = {
        "straight": (lambda: instances.random_domain(rng, C5_MAX_N, C5_HOLES), "straight",
                     lambda d: solve_straight(d)),
        "simple": (lambda: instances.random_domain(rng, C5_MAX_N, 0), "geodesic",
                   lambda d: solve_simple(d)),
        "holes": (lambda: instances.random_domain(rng, C5_MAX_N, C5_HOLES), "geodesic",
                  lambda d: solve_holes(d)),
    }
    for name, (make, metric, solve) in runs.items():
        inside, holes = 0, 0
        for _ in range(C5_COUNT):
            d = make()
            holes += bool(d.holes)
            v = solve(d).optimum.value
            inside += oracle.grid_search_optimum(d, metric, C5_GRID).brackets(v)
        ok &= inside == C5_COUNT
        parts.append(f"{name} {inside}/{C5_COUNT} ({holes} holed)")
    dt = time.perf_counter() - t0
    ok &= dt < C5_SECONDS
    return Outcome(ok, ", ".join(parts) + f", {dt:.0f}s (< {C5_SECONDS:g}s)")


def _convex(rng):
    ang = np.sort(rng.uniform(0, 2 * math.pi, int(rng.integers(3, 10))))
    r = rng.uniform(1, 3)
    return validate_domain([[(r * math.cos(a), r * math.sin(a)) for a in ang]])


def criterion_6() -> Outcome:
    """Cross-solver consistency."""
    rng = _rng(6)
    worst_hs = 0.0
    for _ in range(C6_COUNT):
        d = instances.random_simple(int(rng.integers(4, 12)), rng)
        worst_hs = max(worst_hs, abs(solve_holes(d).optimum.value - solve_simple(d).optimum.value))
    worst_all = 0.0
    for _ in range(C6_COUNT):
        d = _convex(rng)
        vals = [solve_straight(d).optimum.value, solve_simple(d).optimum.value,
                solve_holes(d).optimum.value]
        worst_all = max(worst_all, max(vals) - min(vals))
    ok = worst_hs <= C6_TOL and worst_all <= C6_TOL
    return Outcome(ok, f"holes vs simple {worst_hs:.1e} on {C6_COUNT} simple polygons, "
                       f"three-way spread {worst_all:.1e} on {C6_COUNT} convex (<= {C6_TOL:g})")


def criterion_7() -> Outcome:
    """Analytically forced values."""
    sq = instances.named("unit_square")
    checks = []
    for label, res in (("straight", solve_straight(sq)), ("simple", solve_simple(sq)),
                       ("holes", solve_holes(sq))):
        o = res.optimum
        err = max(abs(o.point.x - 0.5), abs(o.point.y - 0.5), abs(o.value - 0.5))
        checks.append((f"square/{label} {err:.0e}", err <= C7_EXACT))
    o = solve_simple(instances.named("l_shape")).optimum
    err = max(abs(o.point.x - 0.75), abs(o.point.y - 0.75))
    checks.append((f"L-shape {err:.0e}", err <= C7_LSHAPE))
    res = solve_straight(instances.named("holed_square"))
    org = res.extra["l1_origin"]
    hole_ok = (org["x"], org["y"]) == (2.0, 2.0) and not org["feasible"] and len(res.ties) >= 4
    checks.append((f"holed origin ({org['x']:g},{org['y']:g}) feasible={org['feasible']} "
                   f"ties={len(res.ties)}", hole_ok))
    return Outcome(all(c[1] for c in checks), "; ".join(c[0] for c in checks))


def criterion_8() -> Outcome:
    """Vertex-pair bisector displacement under a horizontal source shift."""
    rng = _rng(8)
    h = C8_H
    samples = []
    while len(samples) < C8_COUNT:
        d = instances.random_holed(rng, 8, 2)
        Z = _interior(d, rng)
        try:
            shifts = spm.bisector_shift(d, Z, h)
        except (spm.DegeneratePosition, spm.DegenerateBisector):
            continue
        samples.extend(shifts[:2])
    samples = samples[:C8_COUNT]
    ratios = [s.displacement / h for s in samples]
    hits = sum(abs(r - 0.5) <= C8_REL * 0.5 for r in ratios)
    seen = sorted({round(r, 3) for r in ratios})
    return Outcome(hits == C8_COUNT, f"{hits}/{C8_COUNT} displacements at h/2; "
                                     f"observed displacement/h in {seen}")


def criterion_9() -> Outcome:
    """Empirical growth of the simple-polygon solver."""
    rng = _rng(9)
    times = []
    for n in C9_SIZES:
        per = []
        for _ in range(C9_POLYS):
            d = instances.random_simple(n, rng)
            solve_simple(d, with_value=False)
            best = math.inf
            for _ in range(C9_REPEATS):
                t0 = time.perf_counter()
                solve_simple(d, with_value=False)
                best = min(best, time.perf_counter() - t0)
            per.append(best)
        times.append(statistics.median(per))
    slope = float(np.polyfit(np.log(C9_SIZES), np.log(times), 1)[0])
    ms = ", ".join(f"n={n}: {t * 1e3:.2f}ms" for n, t in zip(C9_SIZES, times))
    return Outcome(slope < 2.0, f"log-log slope {slope:.2f} (< 2); {ms}")


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 10)}


def evaluate(k: int) -> Outcome:
    if k not in REPORT:
        REPORT[k] = CRITERIA[k]()
    return REPORT[k]


def report_lines() -> list[str]:
    return [f"criterion {k}: {'PASS' if o.passed else 'FAIL'} - {o.detail}"
            for k, o in sorted(REPORT.items())]


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    out = evaluate(k)
    print(f"criterion {k}: {'PASS' if out.passed else 'FAIL'} - {out.detail}")
    assert out.passed, out.detail


if __name__ == "__main__":
    for k in sorted(CRITERIA):
        evaluate(k)
        print(report_lines()[-1], flush=True)
    sys.exit(0 if all(o.passed for o in REPORT.values()) else 1)
