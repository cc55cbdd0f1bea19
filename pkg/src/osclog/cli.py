"""Command line entry point: ``osclog <command> [options]``.

Exit status: 0 on success, 2 when an input violates an estimate's hypotheses
(or the config is invalid), 1 on internal or numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import bounds, certify, harness, oscquad, sublevel
from .errors import HypothesisError
from .kernels import kernel
from .poly import MultiPoly, Poly

COMMANDS = ("pv1d", "pvn", "sublevel", "bound", "vdc", "polweight", "certify", "search", "growth")


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument parsing


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work is sequential")
    p.add_argument("--config", help="JSON file of option values (keys as the long option names)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="osclog", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pv1d", help="p.v. int e^{iP(x)} dx/x")
    p.add_argument("--poly", required=True, help='JSON coefficient list, constant first, e.g. "[0,1]"')
    p.add_argument("--method", choices=("ray", "ladder"), default="ray")
    _common(p)

    p = sub.add_parser("pvn", help="p.v. int e^{iP} Omega(x/|x|) |x|^{-n} dx")
    p.add_argument("--poly", required=True, help='terms "coef e1 .. en" separated by ";" or newlines, or @file')
    p.add_argument("--kernel", required=True)
    p.add_argument("--remark", action="store_true", help="also evaluate the odd-kernel half-sphere path")
    p.add_argument("--max-evals", type=int, default=40000)
    _common(p)

    p = sub.add_parser("sublevel", help="{x >= 1 : |P(x)| <= alpha} or a seeded lemma sweep")
    p.add_argument("--poly", help="JSON coefficient list")
    p.add_argument("--alpha", type=float)
    p.add_argument("--lo", type=float, default=1.0)
    p.add_argument("--hi", type=float, default=math.inf)
    p.add_argument("--sweep", type=int, default=0, help="number of seeded random cases")
    p.add_argument("--max-degree", type=int, default=32)
    _common(p)

    p = sub.add_parser("bound", help="geometric-node coefficient bound harness")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-degree", type=int, default=8)
    p.add_argument("--float", dest="exact", action="store_false", help="floating point instead of exact rationals")
    p.add_argument("--t-range", type=_floats, default=[1.01, 3.0])
    _common(p)

    p = sub.add_parser("vdc", help="van der Corput decay check")
    p.add_argument("--poly", required=True, help="phase as a JSON coefficient list")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--lambdas", type=_floats, default=[10.0, 100.0, 1000.0, 10000.0])
    _common(p)

    p = sub.add_parser("polweight", help="int (||P|| / |P|)^{1/2k} over the sphere")
    p.add_argument("--poly", help="homogeneous polynomial terms (see pvn)")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--random", type=int, default=0, help="number of random homogeneous polynomials")
    _common(p)

    p = sub.add_parser("certify", help="degree-halving certificate")
    p.add_argument("--poly", required=True, help="terms (see pvn)")
    p.add_argument("--kernel", required=True)
    p.add_argument("--grid-order", type=int, default=96)
    p.add_argument("--no-measure", dest="measure", action="store_false")
    _common(p)

    p = sub.add_parser("search", help="extremal search for |I_n|")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--budget", type=int, default=500)
    _common(p)

    p = sub.add_parser("growth", help="sup |I_n| against log d")
    p.add_argument("--degrees", type=_ints, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--budget", type=int, default=0)
    p.add_argument("--dist", choices=("uniform", "unit-top-half"), default="uniform")
    _common(p)
    return ap


def apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> argparse.Namespace:
    """Fill options from a JSON config; command-line values given explicitly win."""
    if not args.config:
        return args
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    defaults = vars(parser.parse_args([args.command] + _required_stub(args)))
    for key, val in data.items():
        dest = key.replace("-", "_")
        if dest in ("command", "config") or dest not in defaults:
            raise ConfigError(f"config.{key}: unknown option for '{args.command}'")
        current = getattr(args, dest)
        if current != defaults[dest]:
            continue  # explicit command-line value
        want = defaults[dest]
        if dest in ("degrees",):
            if not (isinstance(val, list) and all(isinstance(v, int) for v in val)):
                raise ConfigError(f"config.{key}: expected a list of integers")
        elif dest in ("lambdas", "t_range"):
            if not (isinstance(val, list) and all(isinstance(v, (int, float)) for v in val)):
                raise ConfigError(f"config.{key}: expected a list of numbers")
            val = [float(v) for v in val]
        elif isinstance(want, bool):
            if not isinstance(val, bool):
                raise ConfigError(f"config.{key}: expected true or false")
        elif isinstance(want, int) and not isinstance(want, bool):
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"config.{key}: expected an integer")
        elif isinstance(want, float):
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ConfigError(f"config.{key}: expected a number")
            val = float(val)
        elif key == "poly" and isinstance(val, list):
            val = json.dumps(val)
        setattr(args, dest, val)
    return args


def _required_stub(args) -> list[str]:
    # placeholder values so that defaults can be read for commands with required options
    stubs = {
        "pv1d": ["--poly", "[0,1]"],
        "pvn": ["--poly", "1 1 0", "--kernel", "cos:1"],
        "vdc": ["--poly", "[0,1]", "--a", "0", "--b", "1"],
        "certify": ["--poly", "1 1 0", "--kernel", "cos:1"],
        "search": ["--d", "1", "--n", "1", "--kernel", "sign"],
        "growth": ["--degrees", "1", "--n", "1", "--kernel", "sign"],
    }
    return stubs.get(args.command, [])


# --------------------------------------------------------------------------
# input parsing


def parse_poly1(text: str) -> Poly:
    return Poly.from_json(text)


def parse_multipoly(text: str, dim: int | None = None) -> MultiPoly:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return MultiPoly.from_text(text.replace(";", "\n"), dim)


# --------------------------------------------------------------------------
# commands


def _emit(args, payload, default_format: str, csv_text: str | None = None) -> None:
    fmt = args.format or default_format
    if fmt == "csv":
        if csv_text is None:
            raise ConfigError(f"format: '{args.command}' has no CSV form")
        text = csv_text
    else:
        text = json.dumps(payload, indent=2, default=_jsonable) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    raise TypeError(f"not serializable: {type(x)}")


def cmd_pv1d(args):
    p = parse_poly1(args.poly)
    est = oscquad.pv_1d(p, tol=args.tol or oscquad.TAIL_TOL, method=args.method)
    _emit(args, oscquad.result_record(p, kernel("sign"), 1, est), "json")


def cmd_pvn(args):
    om = kernel(args.kernel)
    p = parse_multipoly(args.poly, om.dim)
    est = oscquad.In(p, om, tol=args.tol, max_evals=args.max_evals)
    rec = oscquad.result_record(p, om, p.dim, est)
    if args.remark:
        r = oscquad.remark_odd(p, om, tol=args.tol, max_evals=args.max_evals)
        rec["remark_re"], rec["remark_im"], rec["remark_err"] = r.value.real, r.value.imag, r.abs_error_estimate
    _emit(args, rec, "json")


def cmd_sublevel(args):
    if args.sweep:
        rows = [sublevel.sweep_row(p, a) for p, a in sublevel.lemma_suite(args.sweep, args.seed, args.max_degree)]
        _emit(args, rows, "csv", sublevel.sweep_csv(rows))
        return
    if args.poly is None or args.alpha is None:
        raise ConfigError("sublevel: --poly and --alpha are required unless --sweep is given")
    p = parse_poly1(args.poly)
    s = sublevel.sublevel_set(p, args.alpha, (args.lo, args.hi))
    rec = {"poly": p.coeffs.tolist(), "alpha": args.alpha, "domain": [args.lo, args.hi],
           "intervals": [list(iv) for iv in s.intervals]}
    if args.lo >= 1.0:
        rec["log_measure"] = sublevel.log_measure(s)
        try:
            br = sublevel.log_lemma_bracket(args.alpha, sublevel.top_half_max(p), p.degree)
            rec["bracket"], rec["branch"] = br.value, br.branch
        except HypothesisError as exc:
            rec["bracket_error"] = str(exc)
    csv_text = "lo,hi\n" + "".join(f"{a!r},{b!r}\n" for a, b in s.intervals)
    _emit(args, rec, "json", csv_text)


def cmd_bound(args):
    rows = bounds.eq32_harness(args.cases, args.seed, args.max_degree, tuple(args.t_range), args.exact)
    _emit(args, rows, "csv", bounds.rows_csv(rows, bounds.EQ32_COLUMNS))


def cmd_vdc(args):
    p = parse_poly1(args.poly)
    reps = [asdict(bounds.vdc_check(p, lam, args.a, args.b)) for lam in args.lambdas]
    csv_text = "lambda,integral_modulus,N,ratio\n" + "".join(
        f"{r['lam']!r},{r['integral_modulus']!r},{r['N']},{r['ratio']!r}\n" for r in reps)
    _emit(args, reps, "csv", csv_text)


def cmd_polweight(args):
    if args.random:
        polys = [bounds.random_homogeneous(np.random.default_rng([args.seed, args.n, args.k, i]), args.n, args.k)
                 for i in range(args.random)]
    elif args.poly:
        polys = [parse_multipoly(args.poly)]
    else:
        raise ConfigError("polweight: give --poly or --random")
    rows = bounds.polweight_rows(polys, args.tol or 1e-9)
    _emit(args, rows, "csv", bounds.rows_csv(rows, bounds.POLWEIGHT_COLUMNS))


def cmd_certify(args):
    om = kernel(args.kernel)
    p = parse_multipoly(args.poly, om.dim)
    cert = certify.certificate(p, om, grid_order=args.grid_order, measure=args.measure,
                               measure_tol=args.tol or 1e-5)
    sys.stderr.write(cert.table() + "\n")
    text = cert.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_search(args):
    om = kernel(args.kernel, args.n)
    best, val = harness.search_extremal(args.d, args.n, om, args.budget, args.seed)
    _emit(args, {"d": args.d, "n": args.n, "kernel": args.kernel, "seed": args.seed,
                 "budget": args.budget, "value": val, "poly": best.to_text()}, "json")


def cmd_growth(args):
    rows, fit = harness.growth_study(sorted(args.degrees), args.n, args.kernel, args.samples, args.seed,
                                     budget=args.budget, dist=args.dist)
    payload = {"rows": [asdict(r) for r in rows], "fit": asdict(fit)}
    _emit(args, payload, "csv", harness.growth_csv(rows))


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = apply_config(args, parser)
        HANDLERS[args.command](args)
    except (ConfigError, HypothesisError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:  # malformed input
        sys.stderr.write(f"invalid input: {exc}\n")
        return 2
    except Exception as exc:  # internal failure
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
