# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Every function writes into a caller-provided output
and processes the half-open row/sample range [lo, hi), releasing the GIL so
the dispatcher can split work across threads."""

from libc.math cimport INFINITY, exp, log
from libc.stdlib cimport free, malloc

ctypedef double f64


def maxplus_matmul(const f64[:, ::1] A, const f64[:, ::1] B, f64[:, ::1] out,
                   Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t n = A.shape[1], m = B.shape[1]
    cdef f64 a, b, s
    cdef f64 *o
    cdef const f64 *r
    with nogil:
        for i in range(lo, hi):
            o = &out[i, 0]
            for j in range(m):
                o[j] = -INFINITY
            for k in range(n):
                a = A[i, k]
                if a == -INFINITY:
                    continue
                r = &B[k, 0]
                if a == INFINITY:
                    # top times ZERO is ZERO; skip those terms explicitly
                    for j in range(m):
                        b = r[j]
                        if b != -INFINITY and a + b > o[j]:
                            o[j] = a + b
                    continue
                # finite a: a + (-inf) is -inf, so no branch is needed
                for j in range(m):
                    s = a + r[j]
                    o[j] = s if s > o[j] else o[j]


def maxmin_matmul(const f64[:, ::1] A, const f64[:, ::1] B, f64[:, ::1] out,
                  Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t n = A.shape[1], m = B.shape[1]
    cdef f64 a, s
    cdef f64 *o
    cdef const f64 *r
    with nogil:
        for i in range(lo, hi):
            o = &out[i, 0]
            for j in range(m):
                o[j] = -INFINITY
            for k in range(n):
                a = A[i, k]
                if a == -INFINITY:
                    continue
                r = &B[k, 0]
                for j in range(m):
                    s = r[j] if r[j] < a else a
                    o[j] = s if s > o[j] else o[j]


def maxplus_closure(f64[:, ::1] D):
    """In-place Floyd-Warshall over (max, +) with -inf absorbing."""
    cdef Py_ssize_t n = D.shape[0], i, j, k
    cdef f64 a, b, s
    cdef f64 *o
    cdef f64 *r
    with nogil:
        for k in range(n):
            r = &D[k, 0]
            for i in range(n):
                a = D[i, k]
                if a == -INFINITY:
                    continue
                o = &D[i, 0]
                if a == INFINITY:
                    for j in range(n):
                        b = r[j]
                        if b != -INFINITY and a + b > o[j]:
                            o[j] = a + b
                    continue
                for j in range(n):
                    s = a + r[j]
                    o[j] = s if s > o[j] else o[j]


def maxmin_closure(f64[:, ::1] D):
    cdef Py_ssize_t n = D.shape[0], i, j, k
    cdef f64 a, s
    with nogil:
        for k in range(n):
            for i in range(n):
                a = D[i, k]
                if a == -INFINITY:
                    continue
                for j in range(n):
                    s = D[k, j]
                    if a < s:
                        s = a
                    if s > D[i, j]:
                        D[i, j] = s


def sup_convolve(const f64[::1] f, const f64[::1] g, f64[::1] out, long[::1] arg,
                 Py_ssize_t lo, Py_ssize_t hi):
    """out[x] = max_y f[y] + g[x - y]; arg[x] = first maximizing y (or -1)."""
    cdef Py_ssize_t nf = f.shape[0], ng = g.shape[0], x, y, ylo, yhi
    cdef f64 a, b, s
    with nogil:
        for x in range(lo, hi):
            out[x] = -INFINITY
            arg[x] = -1
            ylo = x - ng + 1
            if ylo < 0:
                ylo = 0
            yhi = x + 1
            if yhi > nf:
                yhi = nf
            for y in range(ylo, yhi):
                a = f[y]
                b = g[x - y]
                if a == -INFINITY or b == -INFINITY:
                    continue
                s = a + b
                if s > out[x] or arg[x] < 0:
                    out[x] = s
                    arg[x] = y


def legendre_brute(const f64[::1] x, const f64[::1] phi, const f64[::1] xi,
                   f64[::1] out, long[::1] arg, Py_ssize_t lo, Py_ssize_t hi):
    """out[j] = max_i xi[j]*x[i] + phi[i] over finite phi."""
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef f64 s
    with nogil:
        for j in range(lo, hi):
            out[j] = -INFINITY
            arg[j] = -1
            for i in range(n):
                if phi[i] == -INFINITY:
                    continue
                s = xi[j] * x[i] + phi[i]
                if s > out[j] or arg[j] < 0:
                    out[j] = s
                    arg[j] = i


def lse_quadratic(const f64[::1] y, const f64[::1] a, const f64[::1] xs, f64 c,
                  f64[::1] out, Py_ssize_t lo, Py_ssize_t hi):
    """out[j] = log sum_i exp(a[i] - c*(xs[j] - y[i])**2), fixed summation order.

    Terms more than 746 below the maximum underflow to exactly 0.0 in exp, so
    skipping them leaves every sum bit-identical.
    """
    cdef Py_ssize_t n = y.shape[0], i, j
    cdef f64 d, e, m, acc
    cdef f64 *buf = <f64 *> malloc(n * sizeof(f64))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for j in range(lo, hi):
                m = -INFINITY
                for i in range(n):
                    d = xs[j] - y[i]
                    e = a[i] - c * d * d
                    buf[i] = e
                    if e > m:
                        m = e
                if m == -INFINITY:
                    out[j] = -INFINITY
                    continue
                acc = 0.0
                for i in range(n):
                    e = buf[i] - m
                    if e > -746.0:
                        acc += exp(e)
                out[j] = m + log(acc)
    finally:
        free(buf)
