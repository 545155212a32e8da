# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, floor, fabs, NAN, isnan

cnp.import_array()

DEF AFFINE = 0
DEF GAUSS = 1


def window_max(const cnp.int64_t[::1] symbols, const cnp.int64_t[::1] offsets,
               const double[::1] table, long long n, long long width):
    cdef Py_ssize_t nseq = offsets.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out = np.empty(nseq, dtype=np.float64)
    cdef Py_ssize_t i, j, start, stop
    cdef long long code, top = 1
    cdef double best, v
    for j in range(width - 1):
        top *= n
    for i in range(nseq):
        start = offsets[i]
        stop = offsets[i + 1]
        best = -1e308
        code = 0
        for j in range(start, stop):
            if j - start >= width:
                code -= symbols[j - width] * top
            code = code * n + symbols[j]
            if j - start >= width - 1:
                v = table[code]
                if v > best:
                    best = v
        out[i] = best
    return out


def front_counts(const cnp.int64_t[::1] child_ptr, const cnp.int64_t[::1] child_node,
                 const cnp.int64_t[::1] child_sym, int kind, const double[::1] params,
                 long long r_max):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(r_max + 1, dtype=np.int64)
    cdef long long cap = 1024
    cdef cnp.ndarray[cnp.int64_t, ndim=1] s_node = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] s_scale = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=2] s_state = np.empty((cap, 4), dtype=np.float64)
    cdef long long top = 0, node, ps, sc, r, lo, hi, e, c
    cdef double a0, a1, a2, a3, b0, b1, b2, b3, length, d
    s_node[0] = 0
    s_scale[0] = -1
    if kind == AFFINE:
        s_state[0, 0] = 1.0
    else:
        s_state[0, 0] = 1.0
        s_state[0, 1] = 0.0
        s_state[0, 2] = 0.0
        s_state[0, 3] = 1.0
    top = 1
    while top > 0:
        top -= 1
        node = s_node[top]
        ps = s_scale[top]
        a0 = s_state[top, 0]
        a1 = s_state[top, 1]
        a2 = s_state[top, 2]
        a3 = s_state[top, 3]
        for e in range(child_ptr[node], child_ptr[node + 1]):
            c = child_sym[e]
            if kind == AFFINE:
                b0 = a0 * params[c]
                length = b0
            else:
                d = params[c]
                b0 = a1
                b1 = d * a1 + a0
                b2 = a3
                b3 = d * a3 + a2
                length = 1.0 / (b3 * (b3 + b2))
            sc = <long long> floor(-log(length))
            lo = ps + 1
            if lo < 0:
                lo = 0
            hi = sc if sc < r_max else r_max
            for r in range(lo, hi + 1):
                counts[r] += 1
            if sc < r_max:
                if top >= cap:
                    cap *= 2
                    s_node = np.resize(s_node, cap)
                    s_scale = np.resize(s_scale, cap)
                    s_state = np.resize(s_state, (cap, 4))
                s_node[top] = child_node[e]
                s_scale[top] = sc
                s_state[top, 0] = b0
                if kind == GAUSS:
                    s_state[top, 1] = b1
                    s_state[top, 2] = b2
                    s_state[top, 3] = b3
                top += 1
    return counts


def perron_bracket(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                   const double[::1] weights, double tol, double pivot, long long maxiter):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] xa = np.ones(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] ya = np.empty(n, dtype=np.float64)
    cdef double[::1] x = xa
    cdef double[::1] y = ya
    cdef double lo = 0.0, hi = 0.0, q, s, ymax
    cdef Py_ssize_t i, e, it
    cdef bint use_pivot = not isnan(pivot)
    for it in range(maxiter):
        lo = 1e308
        hi = 0.0
        ymax = 0.0
        for i in range(n):
            s = x[i]
            for e in range(indptr[i], indptr[i + 1]):
                s += weights[e] * x[indices[e]]
            y[i] = s
            q = s / x[i]
            if q < lo:
                lo = q
            if q > hi:
                hi = q
            if s > ymax:
                ymax = s
        for i in range(n):
            x[i] = y[i] / ymax
        if hi - lo < tol:
            break
        if use_pivot and (lo - 1.0 > pivot or hi - 1.0 < pivot):
            break
    return lo - 1.0, hi - 1.0
