"""Growth of sup |I_n| with the degree: CSV per (n, kernel) plus the log fit.

    python3 scripts/growth_study.py --out results/growth
"""
import argparse
import json
from dataclasses import asdict
from pathlib import Path

from osclog.harness import growth_csv, growth_study

FAMILIES = [(1, "sign"), (2, "cos:1")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", default="2,4,8,16,32,64")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--budget", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/growth")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    degrees = [int(s) for s in args.degrees.split(",")]
    for n, form in FAMILIES:
        rows, fit = growth_study(degrees, n, form, args.samples, args.seed, budget=args.budget)
        stem = f"growth_n{n}_{form.replace(':', '')}"
        (out / f"{stem}.csv").write_text(growth_csv(rows))
        (out / f"{stem}_fit.json").write_text(json.dumps(asdict(fit), indent=2) + "\n")
        ratio = rows[-1].sup_abs_integral / rows[min(1, len(rows) - 1)].sup_abs_integral
        print(f"n={n} {form}: R2={fit.r2:.3f} slope={fit.slope:.3f} sup(last)/sup(second)={ratio:.3f}")


if __name__ == "__main__":
    main()
