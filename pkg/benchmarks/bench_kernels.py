"""Benchmark the compiled kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from inscap import _fallback, kernels


def time_joint(fn, n: int, model: int, reps: int = 1) -> float:
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        for x in range(2**n):
            fn(x, n, model, n)
        best = min(best, time.perf_counter() - t0)
    return best


def time_capped(fn, n: int, reps: int = 3) -> float:
    rng = np.random.default_rng(0)
    u = rng.integers(0, 2, size=n, dtype=np.uint8)
    out = np.empty(n, dtype=np.uint8)
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(u, out, 10)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    if not kernels.HAVE_NATIVE:
        print("compiled extension not available; benchmarking fallback only")
    rows = []
    for label, n, model in [("joint simple n=8", 8, 0), ("joint gallager n=6", 6, 1)]:
        t_py = time_joint(_fallback.joint_cells, n, model)
        row = [label, f"python {t_py:.3f}s"]
        if kernels.HAVE_NATIVE:
            from inscap import _native

            t_nat = time_joint(_native.joint_cells, n, model)
            row += [f"native {t_nat:.3f}s", f"speedup {t_py / t_nat:.1f}x"]
        rows.append(row)
    n = 5_000_000
    t_py = time_capped(_fallback.capped_fill, n)
    row = [f"capped fill n={n}", f"python {t_py:.3f}s"]
    if kernels.HAVE_NATIVE:
        from inscap import _native

        t_nat = time_capped(_native.capped_fill, n)
        row += [f"native {t_nat:.3f}s", f"speedup {t_py / t_nat:.1f}x"]
    rows.append(row)
    for row in rows:
        print("  ".join(row))


if __name__ == "__main__":
    main()
