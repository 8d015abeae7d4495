"""Pure numpy fallback with the same signatures as the compiled kernels.

Results for the max/min kernels are bit-identical to the compiled ones (max,
min and a single addition per candidate are exact and order-free).
``lse_quadratic`` may differ in the last ulp because numpy sums pairwise.
"""
import numpy as np

_ROWS = 64


def maxplus_matmul(A, B, out, lo, hi):
    for r in range(lo, hi, _ROWS):
        s = slice(r, min(hi, r + _ROWS))
        with np.errstate(invalid="ignore"):
            t = A[s, :, None] + B[None, :, :]
        t[np.isneginf(A[s])[:, :, None] | np.isneginf(B)[None, :, :]] = -np.inf
        out[s] = t.max(axis=1, initial=-np.inf)


def maxmin_matmul(A, B, out, lo, hi):
    for r in range(lo, hi, _ROWS):
        s = slice(r, min(hi, r + _ROWS))
        out[s] = np.minimum(A[s, :, None], B[None, :, :]).max(axis=1, initial=-np.inf)


def maxplus_closure(D):
    n = D.shape[0]
    for k in range(n):
        col = D[:, k : k + 1]
        row = D[k : k + 1, :]
        with np.errstate(invalid="ignore"):
            t = col + row
        t[np.isneginf(col) | np.isneginf(row)] = -np.inf
        np.maximum(D, t, out=D)


def maxmin_closure(D):
    n = D.shape[0]
    for k in range(n):
        np.maximum(D, np.minimum(D[:, k : k + 1], D[k : k + 1, :]), out=D)


def sup_convolve(f, g, out, arg, lo, hi):
    nf, ng = f.shape[0], g.shape[0]
    for x in range(lo, hi):
        ylo, yhi = max(0, x - ng + 1), min(nf, x + 1)
        a = f[ylo:yhi]
        b = g[x - yhi + 1 : x - ylo + 1][::-1]
        dead = (a == -np.inf) | (b == -np.inf)
        if dead.all():
            out[x], arg[x] = -np.inf, -1
            continue
        s = np.where(dead, -np.inf, a + np.where(dead, 0.0, b))
        k = int(np.argmax(s))
        out[x], arg[x] = s[k], ylo + k


def legendre_brute(x, phi, xi, out, arg, lo, hi):
    ok = phi != -np.inf
    if not ok.any():
        out[lo:hi], arg[lo:hi] = -np.inf, -1
        return
    idx = np.flatnonzero(ok)
    for r in range(lo, hi, _ROWS):
        s = slice(r, min(hi, r + _ROWS))
        t = xi[s, None] * x[None, idx] + phi[None, idx]
        k = np.argmax(t, axis=1)
        out[s] = t[np.arange(t.shape[0]), k]
        arg[s] = idx[k]


def lse_quadratic(y, a, xs, c, out, lo, hi):
    ok = a != -np.inf
    if not ok.any():
        out[lo:hi] = -np.inf
        return
    y, a = y[ok], a[ok]
    for r in range(lo, hi, _ROWS):
        s = slice(r, min(hi, r + _ROWS))
        d = xs[s, None] - y[None, :]
        e = a[None, :] - c * d * d
        m = e.max(axis=1)
        out[s] = m + np.log(np.exp(e - m[:, None]).sum(axis=1))
