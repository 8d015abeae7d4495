"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``TROPICALIS_PURE_PYTHON=1`` to force the fallback.  ``TROPICALIS_THREADS``
caps the number of worker threads used to split output rows (0 or 1 means
sequential).  Every output entry is produced by one sequential loop, so the
thread count never changes the result.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

if os.environ.get("TROPICALIS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


def _threads() -> int:
    try:
        return max(0, int(os.environ.get("TROPICALIS_THREADS", "0")))
    except ValueError:
        return 0


def _run_split(fn, n: int, *args, impl=None):
    """Call ``fn(*args, lo, hi)`` over [0, n), possibly in parallel chunks."""
    t = _threads()
    if t <= 1 or n < 2 * t:
        fn(*args, 0, n)
        return
    bounds = np.linspace(0, n, t + 1).astype(int)
    with ThreadPoolExecutor(max_workers=t) as ex:
        futures = [ex.submit(fn, *args, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        for f in futures:
            f.result()


def _f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def maxplus_matmul(A, B, impl=None) -> np.ndarray:
    impl = impl or _impl
    A, B = _f64(A), _f64(B)
    out = np.empty((A.shape[0], B.shape[1]))
    _run_split(impl.maxplus_matmul, A.shape[0], A, B, out)
    return out


def maxmin_matmul(A, B, impl=None) -> np.ndarray:
    impl = impl or _impl
    A, B = _f64(A), _f64(B)
    out = np.empty((A.shape[0], B.shape[1]))
    _run_split(impl.maxmin_matmul, A.shape[0], A, B, out)
    return out


def maxplus_closure(A, impl=None) -> np.ndarray:
    """Floyd-Warshall transitive closure A+ = A (+) A^2 (+) ... (no identity)."""
    D = _f64(A).copy()
    (impl or _impl).maxplus_closure(D)
    return D


def maxmin_closure(A, impl=None) -> np.ndarray:
    D = _f64(A).copy()
    (impl or _impl).maxmin_closure(D)
    return D


def sup_convolve(f, g, impl=None):
    """Full (max,+) convolution; returns (values, first maximizing index into f)."""
    impl = impl or _impl
    f, g = _f64(f), _f64(g)
    n = f.shape[0] + g.shape[0] - 1
    out = np.empty(n)
    arg = np.empty(n, dtype=np.int_)
    _run_split(impl.sup_convolve, n, f, g, out, arg)
    return out, arg


def legendre_brute(x, phi, xi, impl=None):
    impl = impl or _impl
    x, phi, xi = _f64(x), _f64(phi), _f64(xi)
    out = np.empty(xi.shape[0])
    arg = np.empty(xi.shape[0], dtype=np.int_)
    _run_split(impl.legendre_brute, xi.shape[0], x, phi, xi, out, arg)
    return out, arg


def lse_quadratic(y, a, xs, c: float, impl=None) -> np.ndarray:
    """log sum_i exp(a_i - c*(xs_j - y_i)^2) for every j."""
    impl = impl or _impl
    y, a, xs = _f64(y), _f64(a), _f64(xs)
    out = np.empty(xs.shape[0])
    _run_split(impl.lse_quadratic, xs.shape[0], y, a, xs, float(c), out)
    return out
