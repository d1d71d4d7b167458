"""Exact TV-to-stationarity curves of the flow chain on a small grid, written as CSV."""

import argparse
import sys

from pottsflow import diagnostics, lattices


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=3)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--xs", default="0.3,0.6,0.9")
    ap.add_argument("--t-max", type=int, default=60)
    ap.add_argument("--start", choices=("zero", "worst"), default="worst")
    ap.add_argument("--out", default="-")
    a = ap.parse_args(argv)

    lat = lattices.grid(a.L, a.L)
    xs = [float(v) for v in a.xs.split(",")]
    csv = diagnostics.tv_curve_csv(diagnostics.tv_curve(lat.graph, lat.gens, a.q, xs, a.t_max, a.start))
    if a.out == "-":
        sys.stdout.write(csv)
    else:
        with open(a.out, "w") as fh:
            fh.write(csv)


if __name__ == "__main__":
    main()
