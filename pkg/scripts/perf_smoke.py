"""Time the compiled flow chain on a large grid and report edge touches per step."""

import argparse
import time

from pottsflow import lattices
from pottsflow.flow_chain import FlowChainConfig, RunStats, run
from pottsflow.flows import zero_flow
from pottsflow.rng import stream


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=100)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--x", type=float, default=0.9)
    ap.add_argument("--steps", type=int, default=10**6)
    a = ap.parse_args(argv)

    t0 = time.perf_counter()
    lat = lattices.grid(a.L, a.L)
    cfg = FlowChainConfig(a.x, a.q, lat.gens)
    f0 = zero_flow(lat.graph, a.q)
    print(f"built {a.L}x{a.L} grid (r={lat.gens.r}) in {time.perf_counter() - t0:.2f}s")
    run(f0, cfg, 100, stream(0))
    for steps in (a.steps, 2 * a.steps):
        stats = RunStats()
        t0 = time.perf_counter()
        f = run(f0, cfg, steps, stream(1), stats)
        dt = time.perf_counter() - t0
        print(f"{steps} steps in {dt:.3f}s, {stats.edge_touches / steps:.2f} edge touches/step, |supp f| = {f.support_size}")


if __name__ == "__main__":
    main()
