"""Ebola scenario with exponentially decaying transmission.

Prints the derived rate statistics, the final case and death counts and the
day the effective reproduction number first drops below one. Optionally
writes the trajectory CSV and an SVG of R_eff.

    python scripts/ebola_reff.py --out ebola.csv --plot reff.svg
"""

import argparse

import numpy as np

from epikit import r_eff_series, scenarios, simulate
from epikit.data_io import Table, table_to_csv, write_text
from epikit.models import derived_stats
from epikit.svg import write_plot


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=700.0)
    ap.add_argument("--alpha", type=float, help="override the control decay rate")
    ap.add_argument("--out")
    ap.add_argument("--plot")
    args = ap.parse_args()

    doc = scenarios.preset("ebola")
    doc["t_end"] = args.t_end
    if args.alpha is not None:
        doc["control"]["alpha"] = args.alpha
    sc = scenarios.build_compartment(doc)
    traj = simulate(sc.model, sc.params, sc.init.as_array(), sc.t_end, sc.dt, sc.schedule)
    reff = r_eff_series(traj, sc.seir, sc.schedule)

    for k, v in derived_stats(sc.seir, sc.schedule).as_dict().items():
        print(f"{k:>24}: {v:.4f}")
    print(f"{'final cases':>24}: {traj.y[-1, 5]:.0f}")
    print(f"{'final deaths':>24}: {traj.y[-1, 4]:.0f}")
    cross = reff.crossing_time
    print(f"{'R_eff < 1 from day':>24}: {cross:.2f}" if cross is not None else "R_eff never drops below 1")

    stride = max(1, int(round(1.0 / sc.dt)))
    idx = np.arange(0, len(traj.t), stride)
    if args.out:
        cols = ["t", *traj.names, "r_eff"]
        data = [list(traj.t[idx])] + [list(traj.y[idx, j]) for j in range(6)] + [list(reff.r_eff[idx])]
        write_text(args.out, table_to_csv(Table(cols, data)))
    if args.plot:
        write_plot(args.plot, traj.t[idx], {"R_eff": reff.r_eff[idx], "1": np.ones(idx.size)},
                   title="effective reproduction number")


if __name__ == "__main__":
    main()
