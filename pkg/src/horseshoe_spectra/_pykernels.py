"""Pure-Python/numpy versions of the compiled kernels in ``_ckernels.pyx``."""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix

AFFINE = 0
GAUSS = 1


def window_max(symbols, offsets, table, n, width):
    """Maximum of ``table[code(window)]`` over the width-windows of each sequence."""
    symbols = np.asarray(symbols, dtype=np.int64)
    table = np.asarray(table, dtype=np.float64)
    powers = n ** np.arange(width - 1, -1, -1, dtype=np.int64)
    out = np.empty(len(offsets) - 1)
    for i in range(len(offsets) - 1):
        seq = symbols[offsets[i]:offsets[i + 1]]
        if seq.size < width:
            out[i] = -1e308
            continue
        codes = np.lib.stride_tricks.sliding_window_view(seq, width) @ powers
        out[i] = table[codes].max()
    return out


def front_counts(child_ptr, child_node, child_sym, kind, params, r_max):
    """Number of scale-front words for every r in 0..r_max, by depth-first search."""
    counts = np.zeros(r_max + 1, dtype=np.int64)
    if kind == AFFINE:
        stack = [(0, -1, (1.0,))]
    else:
        stack = [(0, -1, (1.0, 0.0, 0.0, 1.0))]
    while stack:
        node, ps, st = stack.pop()
        for e in range(child_ptr[node], child_ptr[node + 1]):
            c = child_sym[e]
            if kind == AFFINE:
                new = (st[0] * params[c],)
                length = new[0]
            else:
                d = params[c]
                p0, p1, q0, q1 = st
                new = (p1, d * p1 + p0, q1, d * q1 + q0)
                length = 1.0 / (new[3] * (new[3] + new[2]))
            sc = math.floor(-math.log(length))
            for r in range(max(ps + 1, 0), min(sc, r_max) + 1):
                counts[r] += 1
            if sc < r_max:
                stack.append((int(child_node[e]), sc, new))
    return counts


def perron_bracket(indptr, indices, weights, tol, pivot, maxiter):
    """Collatz-Wielandt bracket for the Perron root of an irreducible weighted graph.

    Iterates on ``I + M`` so periodic graphs still converge.
    """
    n = len(indptr) - 1
    m = csr_matrix((weights, indices, indptr), shape=(n, n))
    x = np.ones(n)
    lo = hi = 0.0
    use_pivot = not math.isnan(pivot)
    for _ in range(maxiter):
        y = x + m @ x
        q = y / x
        lo, hi = float(q.min()), float(q.max())
        x = y / y.max()
        if hi - lo < tol:
            break
        if use_pivot and (lo - 1.0 > pivot or hi - 1.0 < pivot):
            break
    return lo - 1.0, hi - 1.0
