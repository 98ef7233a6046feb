#!/usr/bin/env python3
"""Circle fits of (V12, S_k) and (D_k, V_k) over the θ grid, ideal and with noise.

Prints the ideal radii, then the mean and spread of the radii over noisy seeds.
"""

import argparse
import math

import numpy as np

from complementarity.experiments import THETA_COLUMNS, ThetaGridConfig, run_theta_grid
from complementarity.formats import csv_text


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--noise", type=float, default=0.03)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--csv", help="write the ideal grid table here")
    args = ap.parse_args()

    base = ThetaGridConfig(points=args.points)
    ideal = run_theta_grid(base)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv_text(THETA_COLUMNS, (r.values() for r in ideal.rows)))
    print("ideal radii:")
    for name, r in ideal.radii().items():
        print(f"  {name:10s} {r:.12f}")

    samples: dict[str, list[float]] = {k: [] for k in ideal.radii()}
    for seed in range(args.seeds):
        cfg = ThetaGridConfig(points=args.points, noise=args.noise, seed=seed)
        for name, r in run_theta_grid(cfg).radii().items():
            samples[name].append(r)
    print(f"noise sigma={args.noise}, {args.seeds} seeds:")
    for name, values in samples.items():
        v = np.array(values)
        print(f"  {name:10s} mean {v.mean():.4f}  std {v.std(ddof=1) if v.size > 1 else math.nan:.4f}")


if __name__ == "__main__":
    main()
