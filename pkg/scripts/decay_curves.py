"""Decay of the distance to the Haar 2-copy moment under brickwork layers.

    python3 scripts/decay_curves.py --n 3 4 5 6 --samples 1000 --max-t 10 --out decay.csv
"""

import argparse
import csv
import time

import numpy as np

from diagdesign.montecarlo import decay_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--max-t", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    table = []
    for n in args.n:
        start = time.perf_counter()
        res = decay_experiment(n, 2, args.max_t, args.samples, np.random.SeedSequence(args.seed, spawn_key=(n, 2)))
        print(
            f"N={n}  eta={res.eta:.5f}  floor={res.noise_floor:.5f}  alpha={res.alpha:.3f}  "
            f"R^2={res.r_squared:.4f}  fit points={res.fit_points}  ({time.perf_counter() - start:.0f}s)"
        )
        for p in res.points:
            mark = "*" if p.in_fit else " "
            print(f"   T={p.T:2d} {mark} D={p.distance:.6f} +- {p.stderr:.1e}  log2(D/eta)={np.log2(p.distance / res.eta):+.3f}")
            table.append({"n": n, "T": p.T, "D": p.distance, "stderr": p.stderr, "in_fit": p.in_fit})
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(table[0]))
            writer.writeheader()
            writer.writerows(table)


if __name__ == "__main__":
    main()
