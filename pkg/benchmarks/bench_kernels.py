"""Compare the compiled and pure-Python exact path kernels on identical batches.

Usage: python3 benchmarks/bench_kernels.py [--paths N] [--horizon T] [--repeat R]

Both kernels receive the same flattened jump draws, so their outputs must be
bitwise equal; the script checks that before reporting timings.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from gouruin import kernels
from gouruin.fixtures import get_fixture
from gouruin.simulate import JumpSampler, draw_batch

try:
    from gouruin import _ckernels
except ImportError:
    _ckernels = None

CASES = [("remark-2-3", 1.0), ("example-4.7", 0.3), ("example-4.9", 0.0), ("example-4.4-full-plus", 0.5)]


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = func()
        times.append(time.perf_counter() - start)
    return min(times), out


def bench_case(name, z, paths, horizon, repeat, seed=0):
    t = get_fixture(name).triplet()
    batch = draw_batch(JumpSampler.of(t), seed, 0, paths, horizon)
    args = (z, t.drift_xi, t.drift_eta, horizon, batch.offsets, batch.times, batch.xs, batch.ys)
    py_time, py_out = best_of(lambda: kernels.python_simulate_exact_batch(*args), repeat)
    row = {"fixture": name, "z": z, "paths": paths, "jumps": int(batch.offsets[-1]), "python_s": py_time}
    if _ckernels is not None:
        c_time, c_out = best_of(lambda: _ckernels.simulate_exact_batch(*args), repeat)
        equal = all(np.array_equal(py_out[k], c_out[k], equal_nan=True) for k in py_out)
        row.update(cython_s=c_time, speedup=py_time / c_time, identical=equal)
    return row


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--paths", type=int, default=20_000)
    parser.add_argument("--horizon", type=float, default=50.0)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", action="store_true", help="print rows as JSON")
    args = parser.parse_args(argv)

    rows = [bench_case(name, z, args.paths, args.horizon, args.repeat) for name, z in CASES]
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"backend in use: {kernels.BACKEND}")
        print(f"{'fixture':<24}{'jumps':>10}{'python s':>11}{'cython s':>11}{'speedup':>9}  identical")
        for r in rows:
            print(
                f"{r['fixture']:<24}{r['jumps']:>10}{r['python_s']:>11.3f}"
                f"{r.get('cython_s', float('nan')):>11.4f}{r.get('speedup', float('nan')):>9.1f}  {r.get('identical', 'n/a')}"
            )
    return 0 if all(r.get("identical", True) for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
