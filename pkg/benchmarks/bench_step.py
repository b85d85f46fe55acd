"""Time one dephased density-matrix step on each backend.

    python benchmarks/bench_step.py --layers 5 6 7 8 --repeat 3
"""

import argparse
import time

import numpy as np

from gluewalk import kernels
from gluewalk.channel import PhaseDampingChannel
from gluewalk.graph import build_glued_trees
from gluewalk.walk import default_initial_condition, grover_coin, initial_density


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--layers", type=int, nargs="+", default=[5, 6, 7, 8])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--eta", type=float, default=0.9)
    args = parser.parse_args()

    backends = kernels.available_backends()
    coin = grover_coin(3).matrix
    mask = PhaseDampingChannel(args.eta).coin_mask()
    print(f"threads: {kernels.set_threads()}")
    print(f"{'n':>3} {'N':>6} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + "   speedup  max|diff|")
    for n in args.layers:
        g = build_glued_trees(n)
        rho = initial_density(g, default_initial_condition())
        # a few steps so the matrix is not mostly zeros
        for _ in range(2 * n):
            rho = kernels.dephased_step(rho, coin, g.ports, mask)
        results, timings = {}, {}
        for b in backends:
            out = np.empty_like(rho)
            kernels.dephased_step(rho, coin, g.ports, mask, out=out, backend=b)  # warm up / JIT
            timings[b] = best_of(lambda: kernels.dephased_step(rho, coin, g.ports, mask, out=out, backend=b), args.repeat)
            results[b] = out.copy()
        diff = max(float(np.max(np.abs(results[b] - results[backends[0]]))) for b in backends)
        speedup = timings.get("numpy", np.nan) / timings.get("numba", np.nan)
        print(f"{n:>3} {g.dimension:>6} " + " ".join(f"{timings[b]:>12.4f}" for b in backends)
              + f"   {speedup:7.2f}x  {diff:.1e}")


if __name__ == "__main__":
    main()
