"""Compare the compiled and numpy scan kernels on the exhaustive graph searches.

    python3 benchmarks/bench_scan.py [--n 5..7] [--repeat 3]

Prints one line per (cost, n, backend) with the best wall time and checks that
both backends return the same minimum and argmin.
"""
from __future__ import annotations

import argparse
import time

from anydim import kernels
from anydim.cli import parse_n_range
from anydim.objectives import compile_binary_objective
from anydim.parsing import resolve_cost, to_polynomial


def time_scan(arrays, n_edges, backend, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = kernels.scan(arrays, n_edges, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", default="5..7")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--costs", default="goodman,ramsey")
    args = ap.parse_args()
    backends = ["numpy"] + (["cython"] if kernels._compiled is not None else [])
    print(f"{'cost':<10}{'n':>3}{'graphs':>10}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name in args.costs.split(","):
        p = to_polynomial(resolve_cost(name)[1])
        for n in parse_n_range(args.n):
            obj = compile_binary_objective(p, n)
            arrays = obj.flat_arrays()
            n_edges = n * (n - 1) // 2
            times, results = {}, {}
            for b in backends:
                times[b], results[b] = time_scan(arrays, n_edges, b, args.repeat)
            if len(set(results.values())) != 1:
                raise SystemExit(f"backends disagree on {name} n={n}: {results}")
            speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
            print(f"{name:<10}{n:>3}{2 ** n_edges:>10}" + "".join(f"{times[b]:>11.4f}s" for b in backends)
                  + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
