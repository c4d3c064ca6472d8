"""Compiled vs pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from l1median import instances, kernels, spm


def cases():
    d = instances.named("two_holes")
    idx = spm.get_index(d)
    lab = idx.label((0.5, 2.0))
    x0, y0, x1, y1 = d.bbox
    X, Y = np.meshgrid(np.linspace(x0, x1, 200), np.linspace(y0, y1, 100))
    pts = np.column_stack([X.ravel(), Y.ravel()])
    E = np.ascontiguousarray(d.edges)
    V = np.ascontiguousarray(d.vertices)
    return {
        "envelope_pass (two_holes)": lambda b: idx.envelope(lab, backend=b),
        "visible_l1_field (20k pts)": lambda b: kernels.visible_l1_field(0.5, 2.0, pts, E, backend=b),
        "grazing_mask (20k pts)": lambda b: kernels.grazing_mask(0.5, 2.0, pts, V, 1e-9, backend=b),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.BACKEND != "cython":
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    print(f"{'kernel':30s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for name, fn in cases().items():
        t = {}
        for b in ("cython", "python"):
            fn(b)
            t[b] = min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:30s} {t['cython']:10.2f} {t['python']:10.2f} {t['python'] / t['cython']:7.1f}x")


if __name__ == "__main__":
    main()
