"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--dims 4 6 8 10] [--repeat 5]

Prints one row per (kernel, dim) with the best time of each backend and
the speedup, then the end-to-end time of a nilsoliton search.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from solvpinch import _kernels


def _bracket(rng, n):
    c = rng.standard_normal((n, n, n))
    return np.ascontiguousarray(c - c.transpose(1, 0, 2))


def bench(dims, repeat):
    backs = _kernels.backends()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'n':>4}" + "".join(f"{b:>14}" for b in backs) + f"{'speedup':>10}")
    for n in dims:
        c = _bracket(rng, n)
        h = rng.standard_normal((n, n)) + 3 * np.eye(n)
        hi = np.linalg.inv(h)
        cases = {
            "ricci_operator": lambda k: k.ricci_operator(c),
            "act": lambda k: k.act(h, hi, c),
            "jacobi_residual": lambda k: k.jacobi_residual(c),
        }
        for name, fn in cases.items():
            times = {}
            for b, mod in backs.items():
                number = max(1, int(2000 / n ** 2))
                times[b] = min(timeit.repeat(lambda: fn(mod), number=number, repeat=repeat)) / number
            row = f"{name:<16}{n:>4}" + "".join(f"{times[b] * 1e6:>12.1f}us" for b in backs)
            if "cython" in times:
                row += f"{times['python'] / times['cython']:>9.1f}x"
            print(row)


def end_to_end():
    code = (
        "import time; from solvpinch import soliton_search as ss, fixtures as fx, BACKEND;"
        "t=time.perf_counter(); ss.table1_reproduce();"
        "print(BACKEND, round(time.perf_counter()-t, 3))"
    )
    for pure in ("0", "1"):
        env = dict(os.environ, SOLVPINCH_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        backend, secs = out.stdout.split()
        print(f"table1_reproduce ({backend}): {secs}s")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[4, 6, 8, 10])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    bench(args.dims, args.repeat)
    end_to_end()
