"""Time the pure-Python and compiled kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel and backend with the best wall time and the
speed-up of the compiled version. Results must agree exactly (window maxima,
front counts) or to 1e-10 (Perron bracket).
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from horseshoe_spectra import kernels
from horseshoe_spectra.geometry import GaussModel, language_automaton
from horseshoe_spectra.spectra import block_graph
from horseshoe_spectra.symbolic import full_shift


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def cases():
    rng = np.random.default_rng(0)
    symbols = rng.integers(0, 2, 200_000).astype(np.int64)
    offsets = np.r_[0, np.sort(rng.choice(np.arange(1, 200_000), 2_000, replace=False)), 200_000].astype(np.int64)
    table = rng.random(2 ** 5)
    yield "window_max", (symbols, offsets, table, 2, 5), "window_max"

    auto = language_automaton(block_graph(full_shift(3), 2))
    params = np.array(GaussModel((1, 2, 3)).digits, dtype=float)
    yield "front_counts (gauss, r<=12)", (auto.child_ptr, auto.child_node, auto.child_sym, kernels.GAUSS, params, 12), "front_counts"

    adj = block_graph(full_shift(4), 4).adjacency().tocsr()
    w = rng.uniform(0.05, 0.3, adj.nnz)
    yield "perron_bracket (256 vertices)", (adj.indptr.astype(np.int64), adj.indices.astype(np.int64), w, 1e-12, 0, 100_000), "perron_bracket"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    impls = kernels.backends()
    print(f"backends: {', '.join(impls)} (active: {kernels.BACKEND})")
    for label, call_args, name in cases():
        times, results = {}, {}
        for backend, mod in impls.items():
            times[backend], results[backend] = _best(lambda: getattr(mod, name)(*call_args), args.repeat)
        line = "  ".join(f"{b} {t * 1e3:9.2f} ms" for b, t in times.items())
        if "cython" in times:
            a, b = results["python"], results["cython"]
            if name == "perron_bracket":
                same = np.allclose(a[:2], b[:2], rtol=1e-10)
            else:
                same = np.array_equal(a, b)
            line += f"  speed-up {times['python'] / times['cython']:7.1f}x  {'agree' if same else 'DISAGREE'}"
        print(f"{label:32s} {line}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
