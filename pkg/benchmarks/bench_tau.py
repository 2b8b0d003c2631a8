"""Benchmark the tau-certificate search kernel: JIT backend vs pure Python.

The kernel is the exhaustive backtracking search over involutions with
residue/braid/relation pruning.  Both backends run the identical search
(same branch order, same node counts), so besides timing, this script
cross-checks that their outputs agree bit for bit.

Compilation (first call) is timed separately from steady state; steady
state is the best of --repeats runs.

Usage:
    python benchmarks/bench_tau.py
    python benchmarks/bench_tau.py --sizes 14,15,18,20,21,24 --repeats 7
"""

import argparse
import time

import numpy as np

from ggraphs._tauengine import HAVE_NUMBA, get_kernel, search_arrays
from ggraphs.ikn import DEFAULT_BUDGET


def run_once(kernel, n, budget):
    rho, sig_pow, used0, tau0 = search_arrays(n)
    out = np.zeros((1024, n + 1), dtype=np.int64)
    t0 = time.perf_counter()
    status, found, nodes = kernel(n, rho, sig_pow, used0, tau0, budget, 1, out)
    dt = time.perf_counter() - t0
    return dt, (int(status), int(found), int(nodes), out[: int(found)].tobytes())


def best_of(kernel, n, budget, repeats):
    times = []
    result = None
    for _ in range(repeats):
        dt, res = run_once(kernel, n, budget)
        if result is None:
            result = res
        elif res != result:
            raise AssertionError("nondeterministic kernel output for n=%d" % n)
        times.append(dt)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="14,15,17,18,19,20,21",
                    help="comma-separated n values to search exhaustively")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    args = ap.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]

    py_kernel, _ = get_kernel("python")
    backends = [("python", py_kernel)]
    if HAVE_NUMBA:
        nb_kernel, _ = get_kernel("numba")
        t0 = time.perf_counter()
        run_once(nb_kernel, min(sizes), args.budget)
        print("numba warmup (compile + first run): %.3fs" % (time.perf_counter() - t0))
        backends.append(("numba", nb_kernel))
    else:
        print("numba not installed; timing the python backend only")

    header = "%4s %12s" + " %12s" * len(backends) + " %9s"
    cols = ["n", "nodes"] + [name for name, _ in backends]
    cols.append("speedup" if len(backends) == 2 else "")
    print(header % tuple(cols))
    for n in sizes:
        times = []
        results = []
        for _name, kernel in backends:
            dt, res = best_of(kernel, n, args.budget, args.repeats)
            times.append(dt)
            results.append(res)
        if len(results) == 2 and results[0] != results[1]:
            raise AssertionError("backends disagree for n=%d" % n)
        nodes = results[0][2]
        row = [n, nodes] + ["%.6f" % t for t in times]
        row.append("%8.1fx" % (times[0] / times[1]) if len(times) == 2 else "")
        print(header % tuple(row))


if __name__ == "__main__":
    main()
