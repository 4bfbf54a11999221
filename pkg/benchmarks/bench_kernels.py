"""Time the pure-Python and compiled kernel backends on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat 3] [--length 20000]
"""
import argparse
import json
import sys
import timeit

import numpy as np

from qabba import _backend


def cases(length: int, seed: int):
    rng = np.random.default_rng(seed)
    walk = np.cumsum(rng.standard_normal(length))
    a, b = rng.standard_normal(600), rng.standard_normal(500)
    pts = rng.standard_normal((length // 2, 2))
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    xs, ys = np.ascontiguousarray(pts[order, 0]), np.ascontiguousarray(pts[order, 1])
    return {
        "compress_breakpoints": lambda k: k.compress_breakpoints(walk, 0.1, 0),
        "dtw_sq": lambda k: k.dtw_sq(a, b),
        "ga_sweep": lambda k: k.ga_sweep(xs, ys, 0.1),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--length", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    if _backend.compiled is None:
        print("compiled backend unavailable; rebuild with `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    rows = []
    for name, fn in cases(a.length, a.seed).items():
        same = np.array_equal(np.asarray(fn(_backend.pure)), np.asarray(fn(_backend.compiled)))
        t_py = min(timeit.repeat(lambda: fn(_backend.pure), number=1, repeat=a.repeat))
        t_c = min(timeit.repeat(lambda: fn(_backend.compiled), number=1, repeat=a.repeat))
        rows.append({"kernel": name, "pure_s": t_py, "compiled_s": t_c, "speedup": t_py / t_c, "identical": same})
    print(json.dumps(rows, indent=2))
    return 0 if all(r["identical"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
