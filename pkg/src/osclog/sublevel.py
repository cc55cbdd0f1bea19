"""Sublevel sets {x : |P(x)| <= alpha} of univariate polynomials, their
measures, and the sublevel bound formulas (absolute constants omitted)."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import InfiniteMeasure, UnboundedSet, ZeroTail, ZeroTopHalf
from .poly import MultiPoly, Poly, derivative, isolate_roots, nth_derivative
from .sphere import sphere_grid

SWEEP_COLUMNS = ["degree", "alpha", "M", "exact_log_measure", "bracket", "ratio", "branch"]


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint closed intervals inside ``domain``.

    When ``unbounded`` is set the last interval extends to +inf (its right
    endpoint is stored as inf).  Zero-length intervals are tangency points.
    """

    intervals: tuple = ()
    domain: tuple = (1.0, math.inf)
    unbounded: bool = False

    def __post_init__(self):
        iv = tuple((float(a), float(b)) for a, b in self.intervals)
        lo, hi = self.domain
        for k, (a, b) in enumerate(iv):
            if not (lo <= a <= b <= hi):
                raise ValueError(f"interval {(a, b)} outside domain {self.domain}")
            if k and not iv[k - 1][1] < a:
                raise ValueError("intervals must be disjoint and sorted")
        object.__setattr__(self, "intervals", iv)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def contains(self, x: float) -> bool:
        return any(a <= x <= b for a, b in self.intervals)

    def lebesgue_measure(self) -> float:
        if self.unbounded:
            return math.inf
        return float(sum(b - a for a, b in self.intervals))


def log_measure(e: IntervalUnion) -> float:
    """int_E dx/x for E inside [1, inf)."""
    if e.unbounded:
        raise InfiniteMeasure("sublevel set is unbounded; its logarithmic measure is infinite")
    if e.intervals and e.intervals[0][0] < 1.0:
        raise ValueError("log_measure needs every interval inside [1, inf)")
    return float(sum(math.log(b / a) for a, b in e.intervals))


def _breakpoints(p: Poly, alpha: float, lo: float, hi: float):
    pts = []
    for q in (p - alpha, p + alpha):
        if q.is_zero():
            continue
        pts.extend(e.mid for e in isolate_roots(q, (lo, hi)))
    return sorted(set(pts))


def sublevel_intervals(p: Poly, alpha: float, lo: float, hi: float) -> list[tuple[float, float]]:
    """{x in [lo, hi] : |P(x)| <= alpha} for a finite or right-infinite range.

    Breakpoints come from certified roots of P - alpha and P + alpha; each gap
    between consecutive breakpoints is classified at its midpoint.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if p.degree == 0:
        if abs(p.coeffs[0]) <= alpha:
            return [(lo, hi)]
        return []
    inside = lambda x: abs(p(x)) <= alpha
    br = [x for x in _breakpoints(p, alpha, lo, hi) if lo <= x <= hi]
    pts = [lo] + [x for x in br if lo < x < hi] + ([hi] if math.isfinite(hi) else [])
    out: list[list[float]] = []

    def add(a, b):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])

    for k, x in enumerate(pts):
        if inside(x) or x in br:
            add(x, x)
        if k + 1 < len(pts):
            y = pts[k + 1]
            if inside(0.5 * (x + y)):
                add(x, y)
    # past the last breakpoint |P| grows without bound on an infinite range
    return [(a, b) for a, b in out]


def sublevel_set(p: Poly, alpha: float, domain=(1.0, math.inf)) -> IntervalUnion:
    """Closed set {x in domain : |P(x)| <= alpha}; tangencies kept as points."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ValueError("domain must satisfy start < end")
    if p.degree == 0 and abs(p.coeffs[0]) <= alpha:
        if math.isinf(hi):
            raise UnboundedSet("constant polynomial inside the band: sublevel set is the whole half-line")
        return IntervalUnion(((lo, hi),), (lo, hi))
    return IntervalUnion(tuple(sublevel_intervals(p, alpha, lo, hi)), (lo, hi))


# --------------------------------------------------------------------------
# bound formulas


@dataclass(frozen=True)
class BoundBracket:
    value: float
    formula_id: str
    inputs: dict = field(default_factory=dict)
    branch: str = ""


def top_half_max(p: Poly) -> float:
    """M = max{|b_k| : d/2 < k <= d}."""
    d = p.degree
    c = np.abs(p.coeffs)
    return float(max((c[k] for k in range(d // 2 + 1, d + 1)), default=0.0))


def tail_max(p: Poly, r: int) -> float:
    """M_r = max{|b_k| : r <= k <= d}."""
    c = np.abs(p.coeffs)
    return float(c[r:].max()) if r < c.size else 0.0


def log_plus(t: float) -> float:
    return max(math.log(t), 0.0) if t > 0 else 0.0


def log_lemma_bracket(alpha: float, M: float, d: int) -> BoundBracket:
    """min((alpha/M)^{1/d}, 1 + log+(alpha/M)/d).

    e^{s} >= 1 + s makes the power branch the smaller one exactly when
    alpha <= M."""
    if M <= 0:
        raise ZeroTopHalf(
            f"every coefficient b_k with {d}/2 < k <= {d} vanishes; rerun with the effective degree"
        )
    if alpha <= 0 or d < 1:
        raise ValueError("need alpha > 0 and d >= 1")
    t = alpha / M
    power = t ** (1.0 / d)
    logb = 1.0 + log_plus(t) / d
    branch = "power" if t <= 1.0 else "log"
    return BoundBracket(min(power, logb), "log_lemma", {"alpha": alpha, "M": M, "d": d}, branch)


def vinogradov_bracket(alpha: float, M_r: float, r: int, d: int, R: float) -> BoundBracket:
    """R^{1 - r/d} (alpha/M_r)^{1/d}; r = d gives the R-free form."""
    if M_r <= 0:
        raise ZeroTail(f"all coefficients b_k with k >= {r} vanish")
    if not R > 1 or not 0 <= r <= d:
        raise ValueError("need R > 1 and 0 <= r <= d")
    v = R ** (1.0 - r / d) * (alpha / M_r) ** (1.0 / d)
    return BoundBracket(v, "vinogradov", {"alpha": alpha, "M_r": M_r, "r": r, "d": d, "R": R})


def genphase_bracket(k: int, M: float, alpha: float) -> BoundBracket:
    """k (alpha/M)^{1/k} for |phi^(k)| >= M."""
    if k < 1 or M <= 0:
        raise ValueError("need k >= 1 and M > 0")
    return BoundBracket(k * (alpha / M) ** (1.0 / k), "genphase", {"k": k, "M": M, "alpha": alpha})


def derivative_lower_bound(p: Poly, k: int, a: float, b: float) -> float:
    """min over [a, b] of |P^(k)|, via the critical points of P^(k)."""
    q = nth_derivative(p, k)
    if q.degree == 0:
        return abs(float(q.coeffs[0]))
    if isolate_roots(q, (a, b)):
        return 0.0
    cand = [a, b]
    dq = derivative(q)
    if not dq.is_zero():
        cand += [e.mid for e in isolate_roots(dq, (a, b))]
    return float(min(abs(q(x)) for x in cand))


def carbery_wright_bracket(q: float, d: int, n: int, alpha: float, lq_norm: float) -> BoundBracket:
    """min(q d, n) alpha^{1/d} ||P||_q^{-1/d}."""
    if lq_norm <= 0:
        raise ValueError("L^q norm must be positive")
    v = min(q * d, n) * alpha ** (1.0 / d) * lq_norm ** (-1.0 / d)
    return BoundBracket(v, "carbery_wright", {"q": q, "d": d, "n": n, "alpha": alpha, "lq_norm": lq_norm})


# --------------------------------------------------------------------------
# convex bodies: unit cube [0,1]^n and the origin-centred ball of volume 1


def ball_radius(n: int) -> float:
    return (math.gamma(n / 2 + 1) / math.pi ** (n / 2)) ** (1.0 / n)


def _tensor_gauss_cube(n: int, k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    x, w = 0.5 * (x + 1), 0.5 * w
    grids = np.meshgrid(*([x] * n), indexing="ij")
    wg = np.meshgrid(*([w] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], -1), np.prod([g.ravel() for g in wg], axis=0)


def _polar_ball(n: int, k_r: int, order: int, panels: int = 1):
    rho = ball_radius(n)
    if n == 1:
        x, w = np.polynomial.legendre.leggauss(k_r)
        edges = np.linspace(-rho, rho, panels + 1)
        pts = np.concatenate([0.5 * (u + v) + 0.5 * (v - u) * x for u, v in zip(edges, edges[1:])])
        ws = np.concatenate([0.5 * (v - u) * w for u, v in zip(edges, edges[1:])])
        return pts[:, None], ws
    x, w = np.polynomial.legendre.leggauss(k_r)
    edges = np.linspace(0.0, rho, panels + 1)
    r = np.concatenate([0.5 * (u + v) + 0.5 * (v - u) * x for u, v in zip(edges, edges[1:])])
    wr = np.concatenate([0.5 * (v - u) * w for u, v in zip(edges, edges[1:])]) * r ** (n - 1)
    g = sphere_grid(n, order)
    pts = (r[:, None, None] * g.nodes[None, :, :]).reshape(-1, n)
    return pts, np.outer(wr, g.weights).ravel()


def _cube_composite(n: int, k: int, panels: int):
    x, w = np.polynomial.legendre.leggauss(k)
    edges = np.linspace(0.0, 1.0, panels + 1)
    xs = np.concatenate([0.5 * (u + v) + 0.5 * (v - u) * x for u, v in zip(edges, edges[1:])])
    ws = np.concatenate([0.5 * (v - u) * w for u, v in zip(edges, edges[1:])])
    grids = np.meshgrid(*([xs] * n), indexing="ij")
    wg = np.meshgrid(*([ws] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], -1), np.prod([g.ravel() for g in wg], axis=0)


def _sup_on_body(p: MultiPoly, body: str) -> float:
    n = p.dim
    m = {1: 4001, 2: 201, 3: 41}[n]
    if body == "cube":
        ax = np.linspace(0.0, 1.0, m)
        pts = np.stack([g.ravel() for g in np.meshgrid(*([ax] * n), indexing="ij")], -1)
        bounds = [(0.0, 1.0)] * n
        cons = ()
    else:
        rho = ball_radius(n)
        ax = np.linspace(-rho, rho, m)
        pts = np.stack([g.ravel() for g in np.meshgrid(*([ax] * n), indexing="ij")], -1)
        pts = pts[np.einsum("ij,ij->i", pts, pts) <= rho**2]
        bounds = [(-rho, rho)] * n
        cons = ({"type": "ineq", "fun": lambda x: rho**2 - x @ x},)
    vals = np.abs(p(pts))
    best = float(vals.max())
    for i in np.argsort(vals)[::-1][:8]:
        res = minimize(lambda x: -abs(p(x)), pts[i], method="SLSQP", bounds=bounds,
                       constraints=cons, options={"ftol": 1e-14, "maxiter": 200})
        x = res.x
        ok = all(lo - 1e-12 <= xi <= hi + 1e-12 for xi, (lo, hi) in zip(x, bounds))
        if body == "ball":
            ok = ok and x @ x <= ball_radius(n) ** 2 * (1 + 1e-12)
        if ok:
            best = max(best, float(abs(p(x))))
    return best


def lq_norm_on_body(p: MultiPoly, q: float, body: str = "cube", rel_tol: float = 1e-8) -> float:
    """(int_K |P|^q)^{1/q} over the unit-volume cube or ball; q = inf gives the sup."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if body not in ("cube", "ball"):
        raise ValueError("body must be 'cube' or 'ball'")
    n, d = p.dim, p.degree
    if p.is_zero():
        return 0.0
    if math.isinf(q):
        return _sup_on_body(p, body)
    if float(q).is_integer() and int(q) % 2 == 0:
        deg = d * int(q)
        k = deg // 2 + 1
        if body == "cube":
            pts, w = _tensor_gauss_cube(n, k)
        else:
            pts, w = _polar_ball(n, (deg + n) // 2 + 1, deg)
        return float(np.dot(w, p(pts) ** int(q))) ** (1.0 / q)
    # |P|^q is not smooth on the zero set: composite rule, doubling panels
    prev = None
    for level in range(8):
        panels = 2**level
        if body == "cube":
            pts, w = _cube_composite(n, 8, panels)
        else:
            pts, w = _polar_ball(n, 8, 16 * panels + 2 * d, panels)
        val = float(np.dot(w, np.abs(p(pts)) ** q))
        if prev is not None and abs(val - prev) <= rel_tol * abs(val):
            return val ** (1.0 / q)
        prev = val
        if pts.shape[0] > 4_000_000:
            break
    return prev ** (1.0 / q)


def _line_coeffs(p: MultiPoly, rest: np.ndarray) -> np.ndarray:
    """Coefficients in x_1 of P(x_1, rest) for each row of rest."""
    E, coef = p.arrays()
    C = np.zeros((rest.shape[0], p.degree + 1))
    for e, c in zip(E, coef):
        f = c * np.prod(rest ** e[1:], axis=1) if rest.shape[1] else np.full(rest.shape[0], c)
        C[:, e[0]] += f
    return C


def _line_measure(c: np.ndarray, alpha: float, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    nz = np.flatnonzero(c)
    if nz.size == 0 or nz[-1] == 0:
        return (b - a) if abs(c[0]) <= alpha else 0.0
    c = c[: nz[-1] + 1]
    pts = [a, b]
    for s in (-alpha, alpha):
        cc = c.copy()
        cc[0] += s
        r = np.roots(cc[::-1])
        r = r[np.abs(r.imag) <= 1e-9 * (1 + np.abs(r.real))].real
        pts.extend(x for x in r if a < x < b)
    pts = np.sort(pts)
    mids = 0.5 * (pts[1:] + pts[:-1])
    vals = np.abs(np.polynomial.polynomial.polyval(mids, c))
    return float(np.sum(np.diff(pts)[vals <= alpha]))


def body_sublevel_measure(p: MultiPoly, alpha: float, body: str = "cube", lines: int | None = None) -> float:
    """|{x in K : |P(x)| <= alpha}|.

    Exact in x_1 along each line (roots of P -+ alpha), midpoint rule over the
    remaining coordinates."""
    n = p.dim
    if n == 1:
        c = _line_coeffs(p, np.zeros((1, 0)))[0]
        if body == "cube":
            return _line_measure(c, alpha, 0.0, 1.0)
        rho = ball_radius(1)
        return _line_measure(c, alpha, -rho, rho)
    m = lines or {2: 400, 3: 64}[n]
    if body == "cube":
        ax = (np.arange(m) + 0.5) / m
        cell = (1.0 / m) ** (n - 1)
        rest = np.stack([g.ravel() for g in np.meshgrid(*([ax] * (n - 1)), indexing="ij")], -1)
        a = np.zeros(rest.shape[0])
        b = np.ones(rest.shape[0])
    else:
        rho = ball_radius(n)
        ax = -rho + 2 * rho * (np.arange(m) + 0.5) / m
        cell = (2 * rho / m) ** (n - 1)
        rest = np.stack([g.ravel() for g in np.meshgrid(*([ax] * (n - 1)), indexing="ij")], -1)
        s2 = rho**2 - np.einsum("ij,ij->i", rest, rest)
        keep = s2 > 0
        rest, s = rest[keep], np.sqrt(s2[keep])
        a, b = -s, s
    C = _line_coeffs(p, rest)
    return float(cell * np.sum(_lines_measure(C, alpha, a, b)))


def _real_roots_batch(C: np.ndarray) -> np.ndarray:
    """Roots of each row (ascending coefficients, nonzero leading term) as a complex array."""
    k = C.shape[1] - 1
    comp = np.zeros((C.shape[0], k, k))
    comp[:, 1:, :-1] = np.eye(k - 1)
    comp[:, :, -1] = -C[:, :-1] / C[:, -1:]
    return np.linalg.eigvals(comp)


def _lines_measure(C: np.ndarray, alpha: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized _line_measure over rows of C sharing the same degree."""
    out = np.zeros(C.shape[0])
    lead = np.abs(C).max(axis=1)
    deg = np.array([np.flatnonzero(np.abs(r) > 1e-14 * max(m, 1e-300))[-1] if m > 0 else 0
                    for r, m in zip(C, lead)])
    for k in np.unique(deg):
        idx = np.flatnonzero(deg == k)
        if k == 0:
            out[idx] = np.where(np.abs(C[idx, 0]) <= alpha, b[idx] - a[idx], 0.0)
            continue
        c = C[idx, : k + 1]
        pts = [a[idx, None], b[idx, None]]
        for s in (-alpha, alpha):
            cc = c.copy()
            cc[:, 0] += s
            r = _real_roots_batch(cc)
            ok = np.abs(r.imag) <= 1e-9 * (1 + np.abs(r.real))
            x = np.where(ok, r.real, a[idx, None])  # rejected roots collapse onto a
            pts.append(np.clip(x, a[idx, None], b[idx, None]))
        P = np.sort(np.concatenate(pts, axis=1), axis=1)
        mids = 0.5 * (P[:, 1:] + P[:, :-1])
        vals = np.abs(sum(c[:, j, None] * mids**j for j in range(k + 1)))
        out[idx] = np.sum(np.diff(P, axis=1) * (vals <= alpha), axis=1)
    return out


# --------------------------------------------------------------------------
# sweep report


def sweep_row(p: Poly, alpha: float, domain=(1.0, math.inf)) -> dict:
    M = top_half_max(p)
    mu = log_measure(sublevel_set(p, alpha, domain))
    br = log_lemma_bracket(alpha, M, p.degree)
    return {
        "degree": p.degree,
        "alpha": alpha,
        "M": M,
        "exact_log_measure": mu,
        "bracket": br.value,
        "ratio": mu / br.value,
        "branch": br.branch,
    }


def sweep_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def random_poly(rng: np.random.Generator, max_degree: int = 32, scale: float = 10.0) -> Poly:
    """Degree uniform in 1..max_degree, coefficients uniform in [-scale, scale]."""
    d = int(rng.integers(1, max_degree + 1))
    return Poly(rng.uniform(-scale, scale, d + 1))


ALPHA_GRID = tuple(10.0**k for k in range(-6, 4))


def lemma_suite(n_cases: int, seed: int = 0, max_degree: int = 32) -> list[tuple[Poly, float]]:
    """Seeded (P, alpha) cases; the first N cases of a larger suite are the N-case suite."""
    out = []
    for i in range(n_cases):
        rng = np.random.default_rng([seed, i])
        p = random_poly(rng, max_degree)
        alpha = float(ALPHA_GRID[int(rng.integers(len(ALPHA_GRID)))])
        out.append((p, alpha))
    return out


CW_COLUMNS = ["case", "n", "d", "q", "alpha", "lq_norm", "measure", "bracket", "ratio"]


def random_body_poly(rng: np.random.Generator, n: int, d: int) -> MultiPoly:
    """All monomials of total degree <= d in n variables, coefficients uniform on [-1, 1]."""
    import itertools

    exps = [e for e in itertools.product(range(d + 1), repeat=n) if sum(e) <= d]
    c = rng.uniform(-1.0, 1.0, len(exps))
    return MultiPoly(dict(zip(exps, c)), n)


def cw_row(case: int, p: MultiPoly, alpha: float, q: float = 2.0, body: str = "cube") -> dict:
    """Sublevel measure on the unit body against min(qd, n) alpha^{1/d} ||P||_q^{-1/d}."""
    lq = lq_norm_on_body(p, q, body)
    mu = body_sublevel_measure(p, alpha, body)
    br = carbery_wright_bracket(q, p.degree, p.dim, alpha, lq)
    return {"case": case, "n": p.dim, "d": p.degree, "q": q, "alpha": alpha, "lq_norm": lq,
            "measure": mu, "bracket": br.value, "ratio": mu / br.value}


def cw_suite(n_cases: int, seed: int = 0, max_degree: int = 6, q: float = 2.0,
             body: str = "cube") -> list[dict]:
    """Seeded cases with n in {1, 2, 3}, 1 <= d <= max_degree and alpha = 10^u ||P||_q,
    u uniform on [-3, 0]; suites are prefix-nested."""
    rows = []
    for i in range(n_cases):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(1, 4))
        d = int(rng.integers(1, max_degree + 1))
        p = random_body_poly(rng, n, d)
        while p.degree < 1:
            p = random_body_poly(rng, n, d)
        lq = lq_norm_on_body(p, q, body)
        alpha = float(lq * 10 ** rng.uniform(-3.0, 0.0))
        rows.append(cw_row(i, p, alpha, q, body))
    return rows
