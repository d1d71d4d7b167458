"""Repeat the flow-based estimator of Z over many seeds and report how often it lands within e^(+-eps)."""

import argparse
import json
import math
from fractions import Fraction

from pottsflow import lattices, oracle
from pottsflow.counting import EstimateConfig, estimate_z_flow


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=3)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--x", type=float, default=0.9)
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--runs", type=int, default=40)
    ap.add_argument("--chain", choices=("flow", "joint"), default="flow")
    a = ap.parse_args(argv)

    lat = lattices.grid(a.L, a.L)
    exact = float(oracle.exact_z_flow(lat.graph, a.q, Fraction(a.x)))
    errs = []
    for seed in range(a.runs):
        cfg = EstimateConfig(a.epsilon, chain=a.chain, seed=seed, bound_params=lat.class_params)
        rep = estimate_z_flow(lat.graph, lat.gens, a.q, a.x, cfg)
        errs.append(math.log(rep.zeta / exact))
        print(f"seed {seed:3d}  zeta {rep.zeta:.6g}  log err {errs[-1]:+.4f}  steps {rep.total_chain_steps}")
    hits = sum(abs(e) <= a.epsilon for e in errs)
    print(json.dumps({"exact": exact, "runs": a.runs, "within": hits, "max_abs_log_err": max(map(abs, errs))}))


if __name__ == "__main__":
    main()
