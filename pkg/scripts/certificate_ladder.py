"""Certificate totals over d = 2^m and the global measured/total constant.

    python3 scripts/certificate_ladder.py --samples 50
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from osclog.certify import certificate
from osclog.harness import random_poly_nd
from osclog.kernels import kernel

COLUMNS = ["n", "kernel", "m", "d", "sample", "total_bracket", "measured", "ratio"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--kernel", default="sign")
    ap.add_argument("--max-m", type=int, default=6)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--out", default="results/certificate_ladder.csv")
    args = ap.parse_args()
    om = kernel(args.kernel, args.n)
    rows = []
    for m in range(1, args.max_m + 1):
        d = 1 << m
        for i in range(args.samples):
            p = random_poly_nd(np.random.default_rng([args.seed, d, i]), args.n, d)
            c = certificate(p, om, measure_tol=1e-4, max_evals=4000)
            rows.append({"n": args.n, "kernel": args.kernel, "m": m, "d": d, "sample": i,
                         "total_bracket": c.total_bracket, "measured": c.measured, "ratio": c.ratio})
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    ms = np.array([r["m"] for r in rows], float)
    tot = np.array([r["total_bracket"] for r in rows])
    slope, icpt = np.polyfit(ms, tot, 1)
    r2 = 1 - np.sum((tot - (icpt + slope * ms)) ** 2) / np.sum((tot - tot.mean()) ** 2)
    print(f"total ~ {icpt:.3f} + {slope:.3f} m, R2 {r2:.3f}; c_hat {max(r['ratio'] for r in rows):.4f}")


if __name__ == "__main__":
    main()
