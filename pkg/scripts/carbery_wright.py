"""Sublevel measures on the unit cube against the Carbery-Wright bracket; fitted constant per suite size.

    python3 scripts/carbery_wright.py --sizes 200,400,800,1600,3200
"""
import argparse
from pathlib import Path

from osclog.bounds import rows_csv
from osclog.sublevel import CW_COLUMNS, cw_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="200,400,800,1600,3200")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/carbery_wright.csv")
    args = ap.parse_args()
    sizes = sorted(int(s) for s in args.sizes.split(","))
    rows = cw_suite(sizes[-1], args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(rows_csv(rows, CW_COLUMNS))
    for n in sizes:
        part = rows[:n]
        top = max(part, key=lambda r: r["ratio"])
        print(f"N={n}: c_hat {top['ratio']:.4f} (case {top['case']}, n={top['n']}, d={top['d']})")


if __name__ == "__main__":
    main()
