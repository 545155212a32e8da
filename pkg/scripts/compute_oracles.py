"""Recompute the reference values frozen into the test-suite.

Each oracle is computed independently of the package internals (plain numpy
continuants, closed forms), so the tests compare two separate routes.

    python scripts/compute_oracles.py
"""
from __future__ import annotations

import math

import numpy as np


def gauss_box_oracle(digits=(1, 2), depth=20, k_min=12, k_max=20) -> float:
    """Box dimension of the digit-restricted continued-fraction set.

    All cylinders of length ``depth`` are built with vectorized continuants and
    covered by a dyadic grid; the slope is a least-squares fit over
    ``eps = 2^-k_min .. 2^-k_max``.
    """
    p_prev, p = np.array([1.0]), np.array([0.0])
    q_prev, q = np.array([0.0]), np.array([1.0])
    for _ in range(depth):
        ps, qs, pps, qps = [], [], [], []
        for d in digits:
            ps.append(d * p + p_prev)
            qs.append(d * q + q_prev)
            pps.append(p)
            qps.append(q)
        p, q = np.concatenate(ps), np.concatenate(qs)
        p_prev, q_prev = np.concatenate(pps), np.concatenate(qps)
    a = p / q
    b = (p + p_prev) / (q + q_prev)
    left, right = np.minimum(a, b), np.maximum(a, b)
    order = np.argsort(left)
    left, right = left[order], right[order]
    xs, ys = [], []
    for k in range(k_min, k_max + 1):
        eps = 2.0 ** -k
        lo = np.floor(left / eps).astype(np.int64)
        hi = np.floor(right / eps).astype(np.int64)
        # Union of the integer ranges [lo, hi], intervals sorted by left end.
        count, cur_hi = 0, -1
        for l, h in zip(lo, hi):
            if h <= cur_hi:
                continue
            count += h - max(l, cur_hi + 1) + 1
            cur_hi = h
        xs.append(k * math.log(2))
        ys.append(math.log(count))
    return float(np.polyfit(xs, ys, 1)[0])


def main() -> None:
    print("middle third      ln2/ln3            =", math.log(2) / math.log(3))
    x = (math.sqrt(5) - 1) / 2
    print("ratios (1/2,1/4)  -ln(x)/ln2, x^2+x=1 =", -math.log(x) / math.log(2))
    print("subcritical sum   ln2/ln5 + ln2/ln7  =", math.log(2) / math.log(5) + math.log(2) / math.log(7))
    print("suspension base   2 ln2/ln3          =", 2 * math.log(2) / math.log(3))
    print("gauss {1,2} box oracle (depth 20)    =", gauss_box_oracle())


if __name__ == "__main__":
    main()
