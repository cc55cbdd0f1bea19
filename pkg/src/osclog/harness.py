"""Random families, extremal search and the growth study.

Every random draw comes from ``default_rng([seed, d, index])`` so a row never
depends on which other degrees or samples were requested.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize

from .errors import OsclogError
from .kernels import KernelSpec, kernel
from .oscquad import In
from .poly import MultiPoly, homogeneous_parts

GROWTH_COLUMNS = ["d", "n", "kernel_id", "samples", "sup_abs_integral", "empirical_c",
                  "sample_sup", "search_sup", "search_evals"]
SEARCH_STREAM = 1_000_003  # rng stream offset separating search draws from sample draws


# --------------------------------------------------------------------------
# random families


def monomials(n: int, d: int) -> list[tuple]:
    """Exponents of total degree 1..d in n variables, graded then lexicographic."""
    out = []
    for j in range(1, d + 1):
        if n == 1:
            out.append((j,))
        elif n == 2:
            out.extend((j - b, b) for b in range(j + 1))
        else:
            for a in range(j, -1, -1):
                for b in range(j - a, -1, -1):
                    out.append((a, b, j - a - b))
    return out


def normalize_top_half(p: MultiPoly) -> MultiPoly:
    """Dilate so that max_{d/2 < j <= d} ||P_j||_inf = 1 (identity if that half vanishes)."""
    h = homogeneous_parts(p)
    d = h.degree
    top = {j: m for j, m in h.sup_norms.items() if d / 2 < j <= d and m > 0}
    if not top:
        return p
    lam = min(m ** (-1.0 / j) for j, m in top.items())
    return p.dilate(lam)


def random_poly_nd(rng: np.random.Generator, n: int, d: int, dist: str = "uniform") -> MultiPoly:
    """Degree-d polynomial without constant term.

    ``uniform``: every coefficient uniform on [-1, 1].
    ``unit-top-half``: the same, then dilated to unit top half."""
    mons = monomials(n, d)
    c = rng.uniform(-1.0, 1.0, len(mons))
    p = MultiPoly(dict(zip(mons, c)), n)
    if dist == "unit-top-half":
        return normalize_top_half(p)
    if dist != "uniform":
        raise ValueError(f"unknown coefficient distribution {dist!r}")
    return p


def sign_approximant(m: int) -> np.ndarray:
    """Power coefficients of int_0^x (1 - t^2)^m dt, scaled to equal 1 at x = 1 (degree 2m+1)."""
    c = npoly.polyint(npoly.polypow([1.0, 0.0, -1.0], m))
    return c / npoly.polyval(1.0, c)


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class EvalSettings:
    tol: float = 1e-4
    inner_tol: float = 1e-8
    points: int = 256  # fixed angular rule for n = 2 screens


def evaluate(p: MultiPoly, omega: KernelSpec, cfg: EvalSettings = EvalSettings()) -> float:
    """|I_n(P, Omega)|; n = 2 uses the fixed angular rule (a screen, not a converged value)."""
    try:
        if p.dim == 2:
            est = In(p, omega, tol=cfg.tol, inner_tol=cfg.inner_tol, rule="fixed", points=cfg.points)
        else:
            est = In(p, omega, tol=cfg.tol, inner_tol=cfg.inner_tol, max_evals=4000)
    except (OsclogError, FloatingPointError, ValueError, np.linalg.LinAlgError):
        return 0.0
    v = abs(est.value)
    return float(v) if math.isfinite(v) else 0.0


def _ridge(coeffs: np.ndarray, n: int) -> MultiPoly:
    """P(x) = g(x_1) with g(t) = sum_k coeffs[k-1] t^k."""
    terms = {}
    for k, c in enumerate(coeffs, start=1):
        if c != 0.0:
            e = [0] * n
            e[0] = k
            terms[tuple(e)] = float(c)
    return MultiPoly(terms or {tuple([1] + [0] * (n - 1)): 1.0}, n)


def ridge_factor(omega: KernelSpec) -> float | None:
    """c with I_n(g(x_1), Omega) = c * pv_1d(g) when Omega is cos(theta) on S^1."""
    return 2.0 if omega.dim == 2 and omega.form in ("cos", "cos:1") else None


# --------------------------------------------------------------------------
# extremal search


def _one_d_value(coeffs, sign_kernel: KernelSpec, cfg: EvalSettings) -> float:
    return evaluate(_ridge(np.asarray(coeffs, float), 1), sign_kernel, cfg)


def search_extremal(d: int, n: int, omega: KernelSpec | str, budget: int, seed: int,
                    cfg: EvalSettings = EvalSettings(), starts: int = 3) -> tuple[MultiPoly, float]:
    """Maximize |I_n(P, Omega)| over degree-<= d polynomials.

    Candidates: P = x_1, sign-approximant ridges a * S_m(x_1), and random
    draws; the best ``starts`` are refined by Nelder-Mead on the coefficient
    vector.  For n = 1 the search runs on univariate polynomials.  For n = 2
    with Omega = cos(theta) it runs on the ridge family P = g(x_1), where
    I_2 = 2 pv_1d(g) exactly.  Otherwise candidates are full random
    polynomials and refinement acts on all coefficients.  ``budget`` counts
    evaluations.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    omega = kernel(omega, n) if isinstance(omega, str) else omega
    if omega.dim != n:
        raise ValueError("kernel dimension differs from n")
    factor = 1.0 if n == 1 else ridge_factor(omega)
    ridge = factor is not None
    sign = (omega if n == 1 else kernel("sign")) if ridge else None
    used = 0
    seen: list[tuple[float, np.ndarray]] = []

    if ridge:
        def value(v):
            return factor * _one_d_value(v, sign, cfg)
        dim_v = d
    else:
        mons = monomials(n, d)

        def value(v):
            return evaluate(MultiPoly(dict(zip(mons, v)), n), omega, cfg)
        dim_v = len(mons)

    def record(v):
        nonlocal used
        val = value(v)
        used += 1
        seen.append((val, np.array(v, dtype=float)))
        return val

    # structured starts
    cands = []
    e1 = np.zeros(dim_v)
    e1[0] = 1.0
    cands.append(e1)
    if ridge:
        for m in range((d - 1) // 2, -1, -1):
            s = sign_approximant(m)[1:]
            for a in (1.2, 1.5, 1.8, 2.1):
                v = np.zeros(d)
                v[: s.size] = a * s
                cands.append(v)
    rng = np.random.default_rng([seed, d, SEARCH_STREAM])
    while len(cands) < max(budget // 4, 1):
        cands.append(rng.uniform(-1, 1, dim_v))
    for v in cands:
        if used >= budget:
            break
        record(v)

    # local refinement from the best distinct starts
    order = sorted(range(len(seen)), key=lambda i: -seen[i][0])
    picks = order[:starts]
    for rank, i in enumerate(picks):
        left = budget - used
        if left <= dim_v + 1:
            break
        share = left // (len(picks) - rank)
        x0 = seen[i][1]
        step = np.where(x0 != 0, 0.05 * np.abs(x0), 0.05 * max(np.abs(x0).max(), 1e-3))
        simplex = np.vstack([x0] + [x0 + step[k] * np.eye(dim_v)[k] for k in range(dim_v)])
        minimize(lambda v: -record(v), x0, method="Nelder-Mead",
                 options={"maxfev": max(share - dim_v - 1, 1), "initial_simplex": simplex,
                          "xatol": 1e-8, "fatol": 1e-10})
    best_val, best_v = max(seen, key=lambda t: t[0])
    if ridge:
        best = _ridge(best_v, n)
    else:
        best = MultiPoly(dict(zip(monomials(n, d), best_v)), n)
    return normalize_top_half(best), float(best_val)


# --------------------------------------------------------------------------
# growth study


@dataclass
class GrowthRow:
    d: int
    n: int
    kernel_id: str
    samples: int
    sup_abs_integral: float
    empirical_c: float
    sample_sup: float = 0.0
    search_sup: float = 0.0
    search_evals: int = 0


@dataclass
class GrowthFit:
    intercept: float
    slope: float
    r2: float
    power_exponent: float  # alternative model sup ~ C d^beta
    power_r2: float


def fit_log(ds, sups) -> GrowthFit:
    """Least squares sup = a + b log d, plus the power-law alternative."""
    x = np.log(np.asarray(ds, float))
    y = np.asarray(sups, float)
    if x.size < 2:
        return GrowthFit(float(y[0]) if y.size else 0.0, 0.0, 1.0, 0.0, 1.0)

    def ls(x, y):
        A = np.column_stack([np.ones_like(x), x])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        res = y - A @ coef
        tot = float(((y - y.mean()) ** 2).sum())
        r2 = 1.0 - float((res**2).sum()) / tot if tot > 0 else 1.0
        return coef, r2

    (a, b), r2 = ls(x, y)
    pos = y > 0
    if pos.sum() >= 2:
        (_, beta), pr2 = ls(x[pos], np.log(y[pos]))
    else:
        beta, pr2 = 0.0, 0.0
    return GrowthFit(float(a), float(b), float(r2), float(beta), float(pr2))


def growth_study(degrees, n: int, omega: KernelSpec | str, samples: int, seed: int,
                 budget: int = 0, dist: str = "uniform",
                 cfg: EvalSettings = EvalSettings()) -> tuple[list[GrowthRow], GrowthFit]:
    """sup |I_n| over random draws plus searched polynomials, for each degree.

    The reported sup at d is also at least the sup found at every smaller
    listed degree, since lower-degree polynomials are feasible at degree d."""
    degrees = list(degrees)
    if degrees != sorted(degrees):
        raise ValueError("degrees must be sorted")
    kid = omega if isinstance(omega, str) else omega.form
    omega = kernel(omega, n) if isinstance(omega, str) else omega
    rows = []
    for d in degrees:
        best = 0.0
        for i in range(samples):
            rng = np.random.default_rng([seed, d, i])
            best = max(best, evaluate(random_poly_nd(rng, n, d, dist), omega, cfg))
        ssup = 0.0
        if budget > 0:
            _, ssup = search_extremal(d, n, omega, budget, seed, cfg)
        # P_{d'} is contained in P_d, so a smaller degree's sup is also feasible here
        sup = max(best, ssup, rows[-1].sup_abs_integral if rows else 0.0)
        ec = sup / (math.log(d + 1) * (omega.llogl + 1.0))
        rows.append(GrowthRow(d, n, kid, samples, sup, ec, best, ssup, budget))
    fit = fit_log([r.d for r in rows], [r.sup_abs_integral for r in rows])
    return rows, fit


def growth_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=GROWTH_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        rec = asdict(r)
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})
    return buf.getvalue()
