"""Command-line entry point: ``l1median {solve,spm,eval,oracle,check,render}``.

Exit codes: 0 success, 1 invalid instance, 2 solver precondition violated,
3 degenerate input (retry with ``--perturb``), 4 ``check`` failed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from . import objective, oracle, spm, svg
from .geom import DiagonalAlignment, DomainError, PointOutsideDomain, load_instance, perturb
from .solver_holes import solve_holes
from .solver_simple import HasHoles, NotATree, solve_simple
from .solver_straight import TIE_TOL, Candidate, SolveResult, _num, finish, solve_straight

DIGITS = 12
METRICS = ("l1-straight", "l1-geodesic")
SOLVERS = ("auto", "straight", "simple", "holes", "oracle")

EXIT_INVALID, EXIT_PRECONDITION, EXIT_DEGENERATE, EXIT_CHECK = 1, 2, 3, 4


class PreconditionError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    metric: str = "l1-straight"
    solver: str = "auto"
    grid: int = 256
    out: str | None = None
    svg: str | None = None
    perturb: bool = False
    tie_tol: float = TIE_TOL
    threads: int = 1
    meta: bool = True
    extra: dict = field(default_factory=dict)


def pick_solver(metric: str, domain, solver: str = "auto") -> str:
    if solver != "auto":
        return solver
    if metric == "l1-straight":
        return "straight"
    return "holes" if domain.holes else "simple"


def _oracle_result(domain, metric, grid, tie_tol) -> SolveResult:
    best = oracle.grid_search_optimum(domain, metric, grid)
    c = Candidate(best.point, best.value, "oracle-grid")
    return finish(metric, [c], domain.diameter, tie_tol,
                  {"oracle": best.to_record(DIGITS), "candidates_evaluated_grid": best.evaluations})


def solve(cfg: RunConfig, domain) -> SolveResult:
    name = pick_solver(cfg.metric, domain, cfg.solver)
    if name == "straight":
        if cfg.metric != "l1-straight":
            raise PreconditionError("the straight solver handles --metric l1-straight only")
        return solve_straight(domain, tie_tol=cfg.tie_tol)
    if name == "oracle":
        return _oracle_result(domain, cfg.metric, cfg.grid, cfg.tie_tol)
    if cfg.metric != "l1-geodesic":
        raise PreconditionError(f"the {name} solver handles --metric l1-geodesic only")
    if name == "simple":
        return solve_simple(domain, tie_tol=cfg.tie_tol)
    return solve_holes(domain, tie_tol=cfg.tie_tol, threads=cfg.threads)


# -- commands ----------------------------------------------------------------

def _cmd_solve(cfg, domain):
    res = solve(cfg, domain)
    if cfg.svg:
        _write(cfg.svg, _result_svg(domain, res))
    return res.to_record(DIGITS)


def _result_svg(domain, res: SolveResult) -> str:
    if res.metric == "l1-straight":
        return svg.straight_svg(domain, res)
    if "overlay" in res.aux:
        return svg.overlay_svg(domain, res.aux["overlay"], res)
    return svg.spm_svg(spm.build_spm(domain, tuple(res.optimum.point)))


def _cmd_spm(cfg, domain):
    m = spm.build_spm(domain, cfg.extra["point"])
    if cfg.svg:
        _write(cfg.svg, svg.spm_svg(m))
    lab = m.labeling
    return {
        "source": {"x": _num(m.source.x, DIGITS), "y": _num(m.source.y, DIGITS)},
        "vertex_distances": [_num(d, DIGITS) for d in lab.dist],
        "predecessors": [int(p) for p in lab.pred],
        "cells": [{"root": c.root, "quadrant": c.quadrant, "area": _num(c.area, DIGITS)}
                  for c in m.cells],
        "empty_roots": list(m.empty_roots),
        "bisectors": [{"roots": list(b.roots), "kind": b.kind,
                       "chain": [[_num(x, DIGITS), _num(y, DIGITS)] for x, y in b.chain]}
                      for b in m.bisectors],
    }


def _cmd_eval(cfg, domain):
    Z = cfg.extra["point"]
    kind = cfg.metric.removeprefix("l1-")
    rec = {"metric": cfg.metric, "point": {"x": _num(Z[0], DIGITS), "y": _num(Z[1], DIGITS)},
           "f": _num(objective.f_value(domain, Z, kind), DIGITS)}
    try:
        g = objective.gradient_f(domain, Z, kind)
        rec["gradient"] = [_num(g[0], DIGITS), _num(g[1], DIGITS)]
    except spm.DegeneratePosition:
        rec["gradient"] = None
    return rec


def _cmd_oracle(cfg, domain):
    rec = {"metric": cfg.metric, "grid": cfg.grid}
    if cfg.extra.get("point") is not None:
        Z = cfg.extra["point"]
        est, err = oracle.integrate_average(domain, Z, cfg.metric, cfg.grid)
        rec["point"] = {"x": _num(Z[0], DIGITS), "y": _num(Z[1], DIGITS)}
        rec["estimate"] = _num(est, DIGITS)
        rec["error_bound"] = _num(err, DIGITS)
        return rec
    rec.update(oracle.grid_search_optimum(domain, cfg.metric, cfg.grid).to_record(DIGITS))
    return rec


def _cmd_check(cfg, domain):
    path = cfg.extra.get("result")
    if path:
        with open(path) as fh:
            rec = json.load(fh)
        metric = rec["metric"]
    else:
        rec = solve(cfg, domain).to_record(DIGITS)
        metric = rec["metric"]
    metric = "l1-straight" if metric == "l1-straight" else "l1-geodesic"
    opt = rec["optimum"]
    Z = (opt["x"], opt["y"])
    est, err = oracle.integrate_average(domain, Z, metric, cfg.grid)
    best = oracle.grid_search_optimum(domain, metric, cfg.grid)
    value_ok = abs(est - opt["f"]) <= err
    bracket_ok = best.brackets(opt["f"])
    return {"metric": metric, "optimum": opt, "grid": cfg.grid,
            "estimate_at_optimum": _num(est, DIGITS), "error_bound": _num(err, DIGITS),
            "value_matches_estimate": value_ok, "oracle": best.to_record(DIGITS),
            "in_bracket": bracket_ok, "pass": bool(value_ok and bracket_ok)}


def _cmd_render(cfg, domain):
    res = solve(cfg, domain)
    target = cfg.svg or cfg.extra.get("target") or "render.svg"
    _write(target, _result_svg(domain, res))
    return {"svg": target, "metric": res.metric}


COMMANDS = {"solve": _cmd_solve, "spm": _cmd_spm, "eval": _cmd_eval, "oracle": _cmd_oracle,
            "check": _cmd_check, "render": _cmd_render}


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def run(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    try:
        domain = load_instance(cfg.input)
        if cfg.perturb:
            domain = perturb(domain)
    except DiagonalAlignment as e:
        return _fail(EXIT_DEGENERATE, e)
    except (DomainError, OSError, KeyError, ValueError) as e:
        return _fail(EXIT_INVALID, e)
    try:
        rec = COMMANDS[cfg.command](cfg, domain)
    except (PreconditionError, HasHoles, NotATree, PointOutsideDomain) as e:
        return _fail(EXIT_PRECONDITION, e)
    except (spm.DegeneratePosition, spm.DegenerateBisector, DiagonalAlignment,
            objective.IllConditionedFit) as e:
        return _fail(EXIT_DEGENERATE, e)
    if cfg.meta:
        rec["meta"] = {"version": __version__, "command": cfg.command,
                       "elapsed_s": round(time.perf_counter() - t0, 6),
                       "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    text = json.dumps(rec, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        _write(cfg.out, text)
    else:
        sys.stdout.write(text)
    if cfg.command == "check" and not rec["pass"]:
        return EXIT_CHECK
    return 0


def _fail(code, err) -> int:
    print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="l1median",
                                description="Average-distance L1 median of polygonal domains")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, metric=True):
        sp.add_argument("input", help="instance JSON with 'outer' and 'holes'")
        if metric:
            sp.add_argument("--metric", choices=METRICS, default="l1-straight")
        sp.add_argument("--out", help="write the JSON record here instead of stdout")
        sp.add_argument("--perturb", action="store_true",
                        help="jitter vertices on slope +-1 alignments before solving")
        sp.add_argument("--no-meta", dest="meta", action="store_false",
                        help="omit timing metadata (byte-identical reruns)")
        sp.add_argument("--grid", type=int, default=256, help="oracle grid resolution N")

    def solver_opts(sp):
        sp.add_argument("--solver", choices=SOLVERS, default="auto")
        sp.add_argument("--tie-tol", type=float, default=TIE_TOL)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--svg", help="write diagnostics SVG")

    s = sub.add_parser("solve", help="compute the optimum")
    common(s)
    solver_opts(s)

    s = sub.add_parser("spm", help="shortest-path map from a point")
    common(s, metric=False)
    s.add_argument("x", type=float)
    s.add_argument("y", type=float)
    s.add_argument("--svg")

    s = sub.add_parser("eval", help="objective value and gradient at a point")
    common(s)
    s.add_argument("x", type=float)
    s.add_argument("y", type=float)

    s = sub.add_parser("oracle", help="grid reference value or optimum bracket")
    common(s)
    s.add_argument("--at", nargs=2, type=float, metavar=("X", "Y"),
                   help="estimate f at this point instead of searching")

    s = sub.add_parser("check", help="compare a solver result with the oracle")
    common(s)
    solver_opts(s)
    s.add_argument("--result", help="result record to check (default: solve now)")

    s = sub.add_parser("render", help="solve and write the diagnostics SVG")
    common(s)
    solver_opts(s)
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(args.command, args.input, getattr(args, "metric", "l1-geodesic"),
                    getattr(args, "solver", "auto"), args.grid, args.out,
                    getattr(args, "svg", None), args.perturb,
                    getattr(args, "tie_tol", TIE_TOL), getattr(args, "threads", 1), args.meta)
    if args.command in ("spm", "eval"):
        cfg.extra["point"] = (args.x, args.y)
    if args.command == "oracle":
        cfg.extra["point"] = tuple(args.at) if args.at else None
    if args.command == "check":
        cfg.extra["result"] = args.result
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
