"""Temporal convergence order of the ETDRK4 spatial solver.

Runs the Gaussian-seeded spatial SIR at a sequence of halved steps and
reports successive-difference orders log2(|u_h - u_h/2| / |u_h/2 - u_h/4|).

    python scripts/etdrk4_order.py --dts 0.4 0.2 0.1 0.05 0.025
"""

import argparse
import math

import numpy as np

from epikit.spatial import SpatialParams, gaussian_seed_fields, make_grid, run_spatial


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dts", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    ap.add_argument("--t-end", type=float, default=10.0)
    ap.add_argument("--n", type=int, default=128)
    args = ap.parse_args()

    p = SpatialParams(0.5, 0.25, 0.01, 0.01, 0.1, 10.0, 2.0)
    grid = make_grid(100.0, args.n, -50.0)
    init = gaussian_seed_fields(grid, 95.0, 5.0, 0.0, 2.0)
    finals = []
    for dt in args.dts:
        f = run_spatial(init, p, grid, args.t_end, dt, snapshot_every=args.t_end).final
        finals.append(np.concatenate([f.phi_s, f.phi_i]))
    diffs = [np.max(np.abs(a - b)) for a, b in zip(finals, finals[1:])]
    for k, d in enumerate(diffs):
        line = f"dt {args.dts[k]:g} -> {args.dts[k + 1]:g}: max change {d:.3e}"
        if k:
            line += f", order {math.log2(diffs[k - 1] / d):.3f}"
        print(line)


if __name__ == "__main__":
    main()
