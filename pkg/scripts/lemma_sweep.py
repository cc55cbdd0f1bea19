"""Exact log-measures of sublevel sets against the lemma bracket over a seeded ladder of suites.

    python3 scripts/lemma_sweep.py --sizes 1000,4000,16000
"""
import argparse
from pathlib import Path

from osclog.sublevel import lemma_suite, sweep_csv, sweep_row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,4000")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/lemma_sweep.csv")
    args = ap.parse_args()
    sizes = sorted(int(s) for s in args.sizes.split(","))
    rows = [sweep_row(p, a) for p, a in lemma_suite(sizes[-1], args.seed)]
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(sweep_csv(rows))
    for n in sizes:
        part = rows[:n]
        branches = {b: sum(r["branch"] == b for r in part) for b in ("power", "log")}
        print(f"N={n}: max ratio {max(r['ratio'] for r in part):.4f}, branches {branches}")


if __name__ == "__main__":
    main()
