"""Geodesic L1 median of a simple polygon via median chords.

For a simple polygon the vertical trapezoidization is a tree.  Its weighted
median trapezoid ``tau`` splits the rest of the polygon into pieces hanging
off the left and the right wall of ``tau``; every shortest path from a point
of ``tau`` into a left piece starts westward.  The optimal x therefore
balances ``mu_W + q(x)`` against ``mu_E + mu(tau) - q(x)`` where ``q`` is
the (quadratic) area of ``tau`` left of ``x``.  The same on the horizontal
trapezoidization gives y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import Point, PolygonalDomain, Trapezoidization, trapezoidize
from .solver_straight import Candidate, SolveResult, _num, finish, TIE_TOL


class NotATree(ValueError):
    pass


class HasHoles(ValueError):
    pass


@dataclass(frozen=True)
class MedianChord:
    axis: str
    coordinate: float
    trapezoid: int
    on_wall: bool = False
    wall_neighbours: tuple[int, ...] = ()


def _check_tree(trap: Trapezoidization) -> list[list[int]]:
    m = len(trap.trapezoids)
    nb = trap.neighbours()
    if len(trap.adjacency) != m - 1:
        raise NotATree(f"{m} trapezoids but {len(trap.adjacency)} adjacencies")
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in nb[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    if len(seen) != m:
        raise NotATree("trapezoid adjacency graph is disconnected")
    return nb


def _subtree_weights(nb, areas, root=0):
    parent = [-1] * len(nb)
    order = [root]
    parent[root] = root
    for u in order:
        for v in nb[u]:
            if parent[v] == -1:
                parent[v] = u
                order.append(v)
    weight = list(areas)
    for u in reversed(order[1:]):
        weight[parent[u]] += weight[u]
    parent[root] = -1
    return parent, weight


def tree_median(trap: Trapezoidization) -> int:
    """Trapezoid whose removal leaves no component heavier than half."""
    nb = _check_tree(trap)
    areas = [t.area for t in trap.trapezoids]
    total = sum(areas)
    parent, weight = _subtree_weights(nb, areas)
    u = 0
    while True:
        heavy = [v for v in nb[u] if v != parent[u] and weight[v] > 0.5 * total]
        if not heavy:
            return u
        u = heavy[0]


def _component_area(nb, areas, start, blocked):
    seen = {start, blocked}
    stack = [start]
    tot = 0.0
    while stack:
        u = stack.pop()
        tot += areas[u]
        for v in nb[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return tot


def median_chord(domain: PolygonalDomain, axis: str = "vertical") -> MedianChord:
    trap = trapezoidize(domain, axis)
    tau = tree_median(trap)
    nb = trap.neighbours()
    areas = [t.area for t in trap.trapezoids]
    T = trap.trapezoids[tau]
    west = sum(_component_area(nb, areas, v, tau) for v in nb[tau]
               if trap.trapezoids[v].hi <= T.lo + 1e-12 * max(1.0, abs(T.lo)))
    east = sum(areas) - areas[tau] - west
    target = 0.5 * (east + areas[tau] - west)
    h0 = T.top[0] - T.bottom[0]
    h1 = T.top[1] - T.bottom[1]
    width = T.hi - T.lo
    if target <= 0.0:
        walls = tuple(v for v in nb[tau] if trap.trapezoids[v].hi <= T.lo + 1e-12)
        return MedianChord(axis, T.lo, tau, True, walls)
    if target >= areas[tau]:
        walls = tuple(v for v in nb[tau] if trap.trapezoids[v].lo >= T.hi - 1e-12)
        return MedianChord(axis, T.hi, tau, True, walls)
    m = (h1 - h0) / width
    # q(lo + d) = h0 d + m d^2 / 2 = target
    disc = max(h0 * h0 + 2.0 * m * target, 0.0)
    d = 2.0 * target / (h0 + math.sqrt(disc))
    return MedianChord(axis, T.lo + d, tau)


def solve_simple(domain: PolygonalDomain, *, with_value: bool = True,
                 tie_tol: float = TIE_TOL) -> SolveResult:
    """Geodesic L1 median of a simple polygon (unique, always feasible)."""
    if domain.holes:
        raise HasHoles(f"domain has {len(domain.holes)} holes; use solve_holes")
    cx = median_chord(domain, "vertical")
    cy = median_chord(domain, "horizontal")
    p = Point(cx.coordinate, cy.coordinate)
    value = math.nan
    if with_value:
        from .objective import evaluate_f
        value = evaluate_f(domain, p, "geodesic").value
    extra = {"median_chords": [
        {"axis": c.axis, "coordinate": _num(c.coordinate, 12), "trapezoid": c.trapezoid,
         "on_wall": c.on_wall} for c in (cx, cy)]}
    return finish("l1-geodesic-simple", [Candidate(p, value, "median-chords")],
                  domain.diameter, tie_tol, extra)
