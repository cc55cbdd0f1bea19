"""Checkable forms of the remaining estimates: van der Corput decay, sphere
integrals of |P|^{-1/2k}, and the geometric-node interpolation bound on
polynomial coefficients."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateNodes, HypothesisViolated, ZeroPolynomial
from .oscquad import osc_segment
from .poly import MultiPoly, Poly, binary_form_zeros, derivative, isolate_roots, sphere_sup_norm
from .quadrature import adaptive_gauss, tanh_sinh_arcs

EQ32_COLUMNS = ["test_id", "d", "k", "t", "alpha", "bk_abs", "bracket", "ok"]
POLWEIGHT_COLUMNS = ["n", "k", "poly_id", "integral", "running_max"]


# --------------------------------------------------------------------------
# van der Corput


@dataclass(frozen=True)
class VdcReport:
    lam: float
    integral_modulus: float
    N: int
    ratio: float


def _gap_signs(p: Poly, a: float, b: float) -> list[int]:
    """Signs of p on the gaps between its roots inside (a, b)."""
    if p.is_zero():
        return [0]
    pts = [a] + [e.mid for e in isolate_roots(p, (a, b)) if a < e.mid < b] + [b]
    out = []
    for u, v in zip(pts, pts[1:]):
        s = np.sign(p(0.5 * (u + v)))
        if s != 0:
            out.append(int(s))
    return out


def monotonicity_changes(phase: Poly, a: float, b: float) -> int:
    """N = sign changes of phase'' strictly inside (a, b), plus one."""
    s = _gap_signs(derivative(derivative(phase)), a, b)
    return 1 + sum(1 for x, y in zip(s, s[1:]) if x != y)


def check_derivative_floor(phase: Poly, a: float, b: float) -> None:
    """Certify |phase'| >= 1 on [a, b]."""
    dp = derivative(phase)
    pts = [a, b]
    for q in (dp - 1.0, dp + 1.0):
        if not q.is_zero():
            pts += [e.mid for e in isolate_roots(q, (a, b))]
    pts = sorted(set(pts))
    probes = [a, b] + [0.5 * (u + v) for u, v in zip(pts, pts[1:])]
    for x in probes:
        if abs(dp(x)) < 1.0 - 1e-12:
            raise HypothesisViolated(f"|phase'| < 1 at x = {x:.6g} in [{a}, {b}]")


def vdc_check(phase: Poly, lam: float, a: float, b: float) -> VdcReport:
    """|int_a^b e^{i lam phase}| against N/|lam|."""
    if not a < b:
        raise ValueError("need a < b")
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    check_derivative_floor(phase, a, b)
    mod = abs(osc_segment(phase * lam, a, b, weight="1"))
    N = monotonicity_changes(phase, a, b)
    return VdcReport(float(lam), float(mod), N, float(mod * abs(lam) / N))


# --------------------------------------------------------------------------
# sphere integrals of (||P|| / |P|)^{1/2k}


def _binary_beta(p: MultiPoly) -> np.ndarray:
    """P(cos t, sin t) = sum_k beta[k] cos^{d-k} sin^k for homogeneous P in 2 variables."""
    beta = np.zeros(p.degree + 1)
    for (a, b), v in p.terms.items():
        beta[b] += v
    return beta


def _meridian_beta(p: MultiPoly, phi: float) -> np.ndarray:
    """P(sin t cos phi, sin t sin phi, cos t) as a binary form in (cos t, sin t)."""
    beta = np.zeros(p.degree + 1)
    c, s = math.cos(phi), math.sin(phi)
    for (e1, e2, e3), v in p.terms.items():
        beta[e1 + e2] += v * c**e1 * s**e2
    return beta


def _form_values(beta: np.ndarray, t: np.ndarray) -> np.ndarray:
    d = beta.size - 1
    c, s = np.cos(t), np.sin(t)
    return sum(beta[k] * c ** (d - k) * s**k for k in range(d + 1))


def _arcs(zeros: Sequence[float], lo: float, hi: float):
    pts = sorted({z for z in zeros if lo < z < hi} | {lo, hi})
    return list(zip(pts[:-1], pts[1:]))


def _weighted_circle(beta, M, k, lo, hi, tol, jac=None):
    """int_lo^hi (M / |B(t)|)^{1/2k} jac(t) dt, arcs split at the zeros of B."""
    zs = binary_form_zeros(beta, 2 * math.pi) if np.any(beta) else []
    zs = [z for z in zs] + [z - 2 * math.pi for z in zs]
    e = 1.0 / (2 * k)

    def f(t):
        v = np.abs(_form_values(beta, t))
        # a node that rounds onto a zero carries negligible weight; drop it
        g = np.where(v > 0, (M / np.where(v > 0, v, 1.0)) ** e, 0.0)
        return g * jac(t) if jac is not None else g

    res = tanh_sinh_arcs(f, _arcs(zs, lo, hi), tol, max_level=10, min_level=3)
    return res.value, res.error, res.converged


def polweight_integral(p: MultiPoly, tol: float = 1e-9) -> float:
    """int_{S^{n-1}} (||P||_inf / |P(x')|)^{1/2k} dsigma for homogeneous P of degree k.

    n = 2 integrates over the circle split at the zeros of P.  n = 3 integrates
    along meridians (each a binary form in the polar angle, split at its zeros)
    and then adaptively over the azimuth, where meridians that graze the zero
    set leave integrable kinks and peaks.
    """
    if p.is_zero():
        raise ZeroPolynomial("polweight integral of the zero polynomial")
    if not p.is_homogeneous():
        raise ValueError("polynomial must be homogeneous")
    k = p.degree
    n = p.dim
    M = sphere_sup_norm(p)
    if n == 1:
        v = np.abs(p(np.array([[1.0], [-1.0]])))
        return float(np.sum((M / v) ** (1.0 / (2 * k))))
    if n == 2:
        val, _, _ = _weighted_circle(_binary_beta(p), M, k, 0.0, 2 * math.pi, tol)
        return float(val)
    if n != 3:
        raise ValueError("n must be 1, 2 or 3")

    def along(phis):
        out = np.empty(phis.size)
        for i, ph in enumerate(phis):
            # meridian phi covers polar angles (0, pi); the azimuth runs over (0, 2 pi)
            val, _, _ = _weighted_circle(_meridian_beta(p, float(ph)), M, k, 0.0, math.pi,
                                         0.1 * tol, jac=np.sin)
            out[i] = val
        return out

    res = adaptive_gauss(along, [(0.0, 2 * math.pi)], max(tol, 1e-6) * 4 * math.pi,
                         max_evals=20000, grade=1)
    return float(res.value)


def polweight_rows(polys: Iterable[MultiPoly], tol: float = 1e-9) -> list[dict]:
    rows, best = [], 0.0
    for i, p in enumerate(polys):
        v = polweight_integral(p, tol)
        best = max(best, v)
        rows.append({"n": p.dim, "k": p.degree, "poly_id": i, "integral": v, "running_max": best})
    return rows


def random_homogeneous(rng: np.random.Generator, n: int, k: int) -> MultiPoly:
    """Homogeneous degree-k polynomial in n variables with uniform[-1, 1] coefficients."""
    terms = {}
    if n == 2:
        for a in range(k + 1):
            terms[(a, k - a)] = rng.uniform(-1, 1)
    elif n == 3:
        for a in range(k + 1):
            for b in range(k + 1 - a):
                terms[(a, b, k - a - b)] = rng.uniform(-1, 1)
    else:
        terms[(k,)] = rng.uniform(-1, 1)
    return MultiPoly(terms, n)


# --------------------------------------------------------------------------
# Lagrange recovery and the geometric-node bound


def elementary_symmetric_all(values: Sequence) -> list:
    """[sigma_0, ..., sigma_m] as the coefficients of prod (1 + v z).

    Exact for Fraction inputs."""
    e = [values[0] * 0 + 1 if len(values) else 1]
    for v in values:
        e = [e[0]] + [e[i] + v * e[i - 1] for i in range(1, len(e))] + [v * e[-1]]
    return e


def elementary_symmetric(values: Sequence, l: int):
    if not 0 <= l <= len(values):
        raise ValueError("need 0 <= l <= len(values)")
    return elementary_symmetric_all(values)[l]


def lagrange_coefficients(xs: Sequence, ys: Sequence) -> list:
    """b_k = sum_j y_j (-1)^{d-k} sigma_{d-k}(x without x_j) / prod_{i != j} (x_j - x_i).

    Works on floats or Fractions (exact)."""
    d = len(xs) - 1
    if len(ys) != d + 1:
        raise ValueError("xs and ys differ in length")
    if len(set(xs)) != len(xs):
        raise DuplicateNodes("interpolation nodes must be distinct")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("nodes must be strictly increasing")
    zero = xs[0] * 0
    b = [zero] * (d + 1)
    for j in range(d + 1):
        others = [x for i, x in enumerate(xs) if i != j]
        den = xs[0] * 0 + 1
        for x in others:
            den = den * (xs[j] - x)
        sig = elementary_symmetric_all(others)
        w = ys[j] / den
        for k in range(d + 1):
            term = sig[d - k] * w
            b[k] = b[k] + (term if (d - k) % 2 == 0 else -term)
    return b


def lagrange_recover(xs: Sequence[float], ys: Sequence[float]) -> Poly:
    """The unique polynomial of degree <= d through (x_j, y_j)."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    return Poly(lagrange_coefficients(xs, ys))


@dataclass(frozen=True)
class NodeSystem:
    t: float
    d: int
    j_star: int
    A: float
    B: float
    Gamma: float
    candidates: int = 1  # number of j in 0..d satisfying the node inequality


def node_inequality(t, d: int, j: int) -> bool:
    """t^{j-1} < 2 t^d / (t^{d+1} + 1) <= t^j (exact for Fraction t)."""
    v = 2 * t**d / (t ** (d + 1) + 1)
    return t ** (j - 1) < v <= t**j


def node_system(t: float, d: int) -> NodeSystem:
    if not t > 1:
        raise ValueError("need t > 1")
    if d < 1:
        raise ValueError("need d >= 1")
    tf = Fraction(t)
    js = [j for j in range(d + 1) if node_inequality(tf, d, j)]
    if not js:
        raise AssertionError(f"no j satisfies the node inequality for t={t}, d={d}")
    j = js[0]
    A = (t**d - 1) / (t**d + 1)
    B = t**j - 1
    G = 1 - t ** (-(d - j))
    return NodeSystem(float(t), d, j, A, B, G, len(js))


def node_product(t, d: int, j: int):
    """(t^j - 1) ... (t - 1) (1 - 1/t) ... (1 - 1/t^{d-j})."""
    out = t * 0 + 1
    for i in range(1, j + 1):
        out = out * (t**i - 1)
    for i in range(1, d - j + 1):
        out = out * (1 - 1 / t**i)
    return out


def eq32_bracket(alpha, d: int, k: int, t, j: int | None = None):
    """alpha (d+1-k) sigma_k(1, 1/t, ..., 1/t^d) / node_product(t, d, j*).

    Exact when alpha and t are Fractions."""
    if not (d / 2 < k <= d):
        raise ValueError("need d/2 < k <= d")
    if not t > 1:
        raise ValueError("need t > 1")
    if j is None:
        j = node_system(float(t), d).j_star
    inv = [1 / t**i for i in range(d + 1)]
    return alpha * (d + 1 - k) * elementary_symmetric(inv, k) / node_product(t, d, j)


def eq32_case(test_id: int, rng: np.random.Generator, d: int, t, alpha, exact: bool) -> list[dict]:
    """One constructive check: random data in [-alpha, alpha] at nodes t^j."""
    if exact:
        t = Fraction(t)
        alpha = Fraction(alpha)
        xs = [t**j for j in range(d + 1)]
        ys = [alpha * Fraction(int(v), 1 << 20) for v in rng.integers(-(1 << 20), (1 << 20) + 1, d + 1)]
    else:
        xs = [t**j for j in range(d + 1)]
        ys = list(rng.uniform(-alpha, alpha, d + 1))
    b = lagrange_coefficients(xs, ys)
    j = node_system(float(t), d).j_star
    rows = []
    for k in range(d // 2 + 1, d + 1):
        br = eq32_bracket(alpha, d, k, t, j)
        bk = abs(b[k])
        rows.append({"test_id": test_id, "d": d, "k": k, "t": float(t), "alpha": float(alpha),
                     "bk_abs": float(bk), "bracket": float(br), "ok": bool(bk <= br)})
    return rows


def eq32_harness(n_cases: int, seed: int = 0, max_degree: int = 8, t_range=(1.01, 3.0),
                 exact: bool = True) -> list[dict]:
    """Constructive dominance check over random (d, t, data); per-case RNG streams."""
    rows = []
    for i in range(n_cases):
        rng = np.random.default_rng([seed, i])
        d = int(rng.integers(1, max_degree + 1))
        t = float(rng.uniform(*t_range))
        alpha = float(10 ** rng.uniform(-3, 3))
        rows.extend(eq32_case(i, rng, d, t, alpha, exact))
    return rows


def rows_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in columns})
    return buf.getvalue()
