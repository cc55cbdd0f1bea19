"""Suite maxima of the sphere integral of (||P|| / |P|)^{1/2k} per (n, k).

    python3 scripts/polweight_suite.py --n 2 --count 200
"""
import argparse
from pathlib import Path

import numpy as np

from osclog.bounds import POLWEIGHT_COLUMNS, polweight_rows, random_homogeneous, rows_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/polweight")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tol = 1e-9 if args.n == 2 else 1e-6
    for k in range(1, args.kmax + 1):
        polys = [random_homogeneous(np.random.default_rng([args.seed, args.n, k, i]), args.n, k)
                 for i in range(2 * args.count)]
        rows = polweight_rows(polys, tol)
        (out / f"polweight_n{args.n}_k{k}.csv").write_text(rows_csv(rows, POLWEIGHT_COLUMNS))
        print(f"n={args.n} k={k}: max {rows[args.count - 1]['running_max']:.4f} ({args.count}) "
              f"-> {rows[-1]['running_max']:.4f} ({2 * args.count})")


if __name__ == "__main__":
    main()
