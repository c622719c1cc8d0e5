#!/usr/bin/env python3
"""Throughput comparison: compiled kernel vs NumPy fallback.

Usage: python benchmarks/bench_backends.py [--scenarios N] [--repeat K]
"""

import argparse
import time

from angsep import kernels
from angsep.network import NetworkParams


def time_backend(backend: str, params: NetworkParams, n: int, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernels.run_block(params, 0, n, l_min=4, collect_rows=True, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenarios", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    params = NetworkParams(seed=1)
    n = args.scenarios
    print(f"reference parameters, {n} scenarios per timing, best of {args.repeat}")

    t_py = time_backend("python", params, n, args.repeat)
    print(f"python fallback : {t_py:8.3f} s  ({n / t_py:9.0f} scenarios/s, "
          f"{t_py / n * 1e6:6.1f} us/scenario)")

    if kernels.compiled_available():
        t_cy = time_backend("compiled", params, n, args.repeat)
        print(f"compiled kernel : {t_cy:8.3f} s  ({n / t_cy:9.0f} scenarios/s, "
              f"{t_cy / n * 1e6:6.1f} us/scenario)")
        print(f"speedup         : {t_py / t_cy:8.1f} x")
    else:
        print("compiled kernel : not built")


if __name__ == "__main__":
    main()
