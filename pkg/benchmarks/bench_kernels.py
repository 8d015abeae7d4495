"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Each row reports the best wall time per backend and the speedup. Results are
also checked for equality, so a run doubles as a smoke test of the build.
"""
from __future__ import annotations

import argparse
import os
import timeit

import numpy as np

from tropicalis import kernels


def cases(quick: bool):
    rng = np.random.default_rng(0)
    n = 96 if quick else 256
    A, B = rng.normal(size=(n, n)), rng.normal(size=(n, n))
    S = -np.abs(rng.normal(size=(n // 2, n // 2))) - 0.1  # no positive cycles, so the closure is defined
    f, g = rng.normal(size=4 * n), rng.normal(size=4 * n)
    x = np.linspace(-4, 4, 8 * n)
    xi = np.linspace(-2, 2, 2 * n)
    y = np.linspace(-6, 6, 4 * n)
    a = -y * y / 0.2
    yield f"maxplus_matmul {n}x{n}", lambda k: kernels.maxplus_matmul(A, B, impl=k)
    yield f"maxmin_matmul {n}x{n}", lambda k: kernels.maxmin_matmul(A, B, impl=k)
    yield f"maxplus_closure {n // 2}", lambda k: kernels.maxplus_closure(S, impl=k)
    yield f"sup_convolve {4 * n}*{4 * n}", lambda k: kernels.sup_convolve(f, g, impl=k)
    yield f"legendre_brute {8 * n}->{2 * n}", lambda k: kernels.legendre_brute(x, -x * x / 2, xi, impl=k)
    yield f"lse_quadratic {4 * n}", lambda k: kernels.lse_quadratic(y, a, y, 5.0, impl=k)
    # the Cole-Hopf regime: y^2/2 data on [-6, 6], step 0.01, h = 0.025, t = 1
    h, yc = 0.025, np.linspace(-6, 6, 1201)
    yield "lse_quadratic cole-hopf h=0.025", lambda k: kernels.lse_quadratic(yc, -yc * yc / (2 * h), yc, 1 / (2 * h), impl=k)


def same(r1, r2) -> bool:
    if isinstance(r1, tuple):
        return all(same(a, b) for a, b in zip(r1, r2))
    return bool(np.allclose(r1, r2, rtol=1e-13, atol=1e-13, equal_nan=True))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small sizes, for CI")
    args = ap.parse_args()
    if "cython" not in kernels.BACKENDS:
        raise SystemExit("compiled backend not built; run `pip install -e . --no-build-isolation`")
    cy, py = kernels.BACKENDS["cython"], kernels.BACKENDS["python"]
    print(f"threads={os.environ.get('TROPICALIS_THREADS', 'default')} repeat={args.repeat}")
    print(f"{'kernel':34s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}  agree")
    for name, fn in cases(args.quick):
        agree = same(fn(cy), fn(py))
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        print(f"{name:34s} {1e3 * t_cy:10.2f} {1e3 * t_py:10.2f} {t_py / t_cy:8.1f}  {'yes' if agree else 'NO'}")


if __name__ == "__main__":
    main()
