"""Structural bound calculator following the degree-halving argument.

At each level d = 2^m the polynomial is dilated so that the largest sup norm
among the parts of degree in (d/2, d] equals 1; the level then contributes

    i1_tail        sum_{d/2 < j <= d} m_j / j * ||Omega||_1
    vdc_term       measured |int over {|dP/dr| > d} e^{iP} dr/r| against |Omega|
    sublevel_term  log measure of {r in [1, R] : |dP/dr| <= d} against |Omega|
    young_terms    (int (||P_j0|| / |P_j0|)^{1/2 j0}, ||Omega||_{L log L})

and the recursion continues on the low part Q = sum_{j <= d/2} P_j.  The
degree-one base case is ||Omega||_1 + int log(||P||^{1/2} / |P|^{1/2}) |Omega|.
All absolute constants are set to 1.

Young split used for the log term, pointwise in x' with s = (||P||/|P|)^{1/2 j0} >= 1
and u = |Omega(x')|:

    u log s <= s + u log+ u

(for u <= 1 use log s <= s; for u > 1 use u log s <= u log u - u + s).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds
from .errors import DegenerateTopHalf, UnboundedSet, ZeroLinearForm
from .kernels import KernelSpec
from .oscquad import In, osc_segment, osc_tail
from .poly import (HomogeneousParts, MultiPoly, Poly, derivative, homogeneous_parts, isolate_roots,
                   sphere_sup_norm)
from .quadrature import tanh_sinh_arcs
from .sphere import SphereGrid, sphere_grid
from .sublevel import log_measure, sublevel_set


@dataclass
class LevelTerms:
    d: int
    scale: float
    j0: int
    i1_tail: float
    vdc_term: float
    sublevel_term: float
    polweight_part: float
    llogl_part: float
    vdc_reference: float = 0.0  # sum of |Omega| N(x') / d on the grid
    paper_log_term: float = 0.0  # (1/d) int log(d / max_j j|P_j|) |Omega|
    young_ok: bool = True
    skipped: bool = False  # top half vanished: the level passes Q through unchanged

    @property
    def total(self) -> float:
        return self.i1_tail + self.vdc_term + self.sublevel_term + self.polweight_part + self.llogl_part


@dataclass
class Certificate:
    degree_ladder: list
    levels: list
    base_c1: float
    total_bracket: float
    measured: float | None = None
    measured_error: float | None = None
    ratio: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        levels = []
        for lv in self.levels:
            rec = asdict(lv)
            rec["total"] = lv.total
            levels.append(rec)
        return json.dumps({
            "degree_ladder": self.degree_ladder,
            "levels": levels,
            "base_c1": self.base_c1,
            "total_bracket": self.total_bracket,
            "measured": self.measured,
            "measured_error": self.measured_error,
            "ratio": self.ratio,
            "diagnostics": self.diagnostics,
        }, indent=2)

    def table(self) -> str:
        head = f"{'d':>5} {'i1_tail':>11} {'vdc':>11} {'sublevel':>11} {'polweight':>11} {'llogl':>11} {'total':>11}"
        lines = [head]
        for lv in self.levels:
            lines.append(f"{lv.d:>5} {lv.i1_tail:11.5g} {lv.vdc_term:11.5g} {lv.sublevel_term:11.5g} "
                         f"{lv.polweight_part:11.5g} {lv.llogl_part:11.5g} {lv.total:11.5g}")
        lines.append(f"{1:>5} {'base c1':>11} {self.base_c1:11.5g}")
        lines.append(f"total bracket {self.total_bracket:.6g}")
        if self.measured is not None:
            lines.append(f"measured |I| {self.measured:.6g}  ratio {self.ratio:.6g}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# normalization and level terms


def _top_half(h: HomogeneousParts) -> dict:
    d = h.degree
    return {j: h.sup_norms.get(j, 0.0) for j in range(d // 2 + 1, d + 1)}


def normalize_dilation(h: HomogeneousParts) -> tuple[HomogeneousParts, float]:
    """Dilate r -> lam r so that max_{d/2 < j <= d} m_j = 1; j0 goes to diagnostics."""
    top = {j: m for j, m in _top_half(h).items() if m > 0}
    if not top:
        raise DegenerateTopHalf(f"all parts of degree in ({h.degree}/2, {h.degree}] vanish")
    # max_j m_j lam^j = 1 at lam = min_j m_j^{-1/j}
    lam = min(m ** (-1.0 / j) for j, m in top.items())
    g = h.dilate(lam)
    j0 = max(top, key=lambda j: (g.sup_norms[j], j))
    g.diagnostics["j0"] = j0
    g.diagnostics["scale"] = lam
    return g, lam


def i1_term(h: HomogeneousParts, omega: KernelSpec) -> float:
    """sum_{d/2 < j <= d} m_j / j * ||Omega||_1."""
    return float(sum(m / j for j, m in _top_half(h).items()) * omega.l1)


def _grid(n: int, order: int) -> SphereGrid:
    return sphere_grid(n, order)


def i1_measured(h: HomogeneousParts, omega: KernelSpec, grid: SphereGrid | None = None) -> float:
    """int int_0^1 |e^{iP} - e^{iQ}| dr/r |Omega| computed directly."""
    grid = grid or _grid(h.dim, 64)
    C = h.coefficient_matrix(grid.nodes)
    half = h.degree // 2
    r, w = np.polynomial.legendre.leggauss(64)
    r, w = 0.5 * (r + 1), 0.5 * w
    powers = r[None, :] ** np.arange(C.shape[1])[:, None]
    hi_part = C[:, half + 1:] @ powers[half + 1:]
    vals = (2 * np.abs(np.sin(0.5 * hi_part)) / r) @ w
    return float(grid.integrate(vals * np.abs(omega(grid.nodes))))


def _region_integral(ray: Poly, intervals, lo: float, hi: float) -> complex:
    """int e^{iP} dr/r over [lo, hi] minus the given closed intervals."""
    gaps, cur = [], lo
    for a, b in intervals:
        if a > cur:
            gaps.append((cur, a))
        cur = max(cur, b)
    if cur < hi:
        gaps.append((cur, hi))
    total = 0j
    for a, b in gaps:
        if math.isinf(b):
            total += osc_tail(ray, a)
        elif b > a:
            total += osc_segment(ray, a, b, "1/x")
    return total


def _inflections(ray: Poly, lo: float, hi: float) -> int:
    q = derivative(derivative(ray))
    if q.is_zero() or q.degree == 0:
        return 0
    return sum(1 for e in isolate_roots(q, (lo, hi)) if not e.touch and lo < e.mid < hi)


def i2_split(h: HomogeneousParts, omega: KernelSpec, R: float = math.inf,
             grid: SphereGrid | None = None) -> tuple[float, float]:
    """(vdc_part, sublevel_part) over the sphere grid; see i2_details."""
    out = i2_details(h, omega, R, grid)
    return out["vdc_part"], out["sublevel_part"]


def i2_details(h: HomogeneousParts, omega: KernelSpec, R: float = math.inf,
               grid: SphereGrid | None = None) -> dict:
    """Per ray x': the set {r in [1, R] : |dP/dr| <= d} from certified roots,
    its log measure, and the measured integral over the complement."""
    d = h.degree
    grid = grid or _grid(h.dim, 96)
    C = h.coefficient_matrix(grid.nodes)
    om = np.abs(omega(grid.nodes))
    vdc = np.zeros(len(grid))
    sub = np.zeros(len(grid))
    ref = np.zeros(len(grid))
    unbounded = 0
    for i in range(len(grid)):
        if om[i] == 0.0:
            continue
        ray = Poly(C[i])
        dray = derivative(ray)
        try:
            s = sublevel_set(dray, float(d), (1.0, R))
        except UnboundedSet:
            unbounded += 1
            continue
        if s.unbounded or (s.intervals and math.isinf(s.intervals[-1][1])):
            unbounded += 1
            continue
        sub[i] = log_measure(s)
        if ray.degree >= 1:
            vdc[i] = abs(_region_integral(ray, s.intervals, 1.0, R))
        pieces = (len(s) + 1) * (1 + _inflections(ray, 1.0, R))
        ref[i] = pieces / d
    return {
        "vdc_part": float(grid.integrate(vdc * om)),
        "sublevel_part": float(grid.integrate(sub * om)),
        "vdc_reference": float(grid.integrate(ref * om)),
        "unbounded_rays": unbounded,
    }


def paper_log_term(h: HomogeneousParts, omega: KernelSpec, grid: SphereGrid | None = None) -> float:
    """(1/d) int log(d / max_{d/2 < j <= d} j |P_j(x')|) |Omega| on the grid."""
    d = h.degree
    grid = grid or _grid(h.dim, 96)
    C = h.coefficient_matrix(grid.nodes)
    js = np.arange(d // 2 + 1, d + 1)
    mx = np.max(js[None, :] * np.abs(C[:, js]), axis=1)
    with np.errstate(divide="ignore"):
        v = np.log(d / np.maximum(mx, 1e-300))
    return float(grid.integrate(v * np.abs(omega(grid.nodes))) / d)


def young_decompose(h: HomogeneousParts, omega: KernelSpec, grid: SphereGrid | None = None):
    """(polweight_part, llogl_part, young_ok): the pointwise Young split checked on the grid."""
    j0 = h.diagnostics.get("j0") or h.top_half_max()[0]
    pj = h.parts.get(j0)
    if pj is None or pj.is_zero():
        raise DegenerateTopHalf(f"part of degree {j0} vanishes")
    pw = bounds.polweight_integral(pj)
    grid = grid or _grid(h.dim, 96)
    M = h.sup_norms.get(j0) or sphere_sup_norm(pj)
    v = np.abs(pj(grid.nodes))
    s = (M / np.maximum(v, 1e-300)) ** (1.0 / (2 * j0))
    u = np.abs(omega(grid.nodes))
    lhs = u * np.log(s)
    rhs = s + u * np.log(np.maximum(u, 1.0))
    ok = bool(np.all(lhs <= rhs * (1 + 1e-12) + 1e-300))
    return pw, omega.llogl, ok


# --------------------------------------------------------------------------
# base case


def _linear_log_integral(b: np.ndarray, omega: KernelSpec) -> float:
    """int log(||P||^{1/2} / |P(x')|^{1/2}) |Omega| for P = b . x."""
    n = b.size
    nb = float(np.linalg.norm(b))
    if n == 1:
        return 0.0
    if n == 2:
        z = math.atan2(b[1], b[0]) + 0.5 * math.pi
        cuts = sorted({z % math.pi, z % math.pi + math.pi} | {s % (2 * math.pi) for s in omega.singular})
        pts = sorted({0.0, 2 * math.pi} | {c for c in cuts if 0 < c < 2 * math.pi})

        def f(t):
            X = np.column_stack([np.cos(t), np.sin(t)])
            v = np.abs(X @ b)
            return 0.5 * np.log(nb / np.maximum(v, 1e-300)) * np.abs(omega(X))

        return float(tanh_sinh_arcs(f, list(zip(pts[:-1], pts[1:])), 1e-10, max_level=10).value)
    # n = 3: polar axis along b, z = cos(polar angle); log singularity at z = 0
    e3 = b / nb
    tmp = np.array([1.0, 0, 0]) if abs(e3[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = tmp - e3 * (tmp @ e3)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    m = 128 + 8 * omega.order
    ph = 2 * np.pi * (np.arange(m) + 0.5) / m

    def f(z):
        s = np.sqrt(np.maximum(1 - z**2, 0.0))
        X = (s[:, None, None] * (np.cos(ph)[None, :, None] * e1 + np.sin(ph)[None, :, None] * e2)
             + z[:, None, None] * e3).reshape(-1, 3)
        ring = np.abs(omega(X)).reshape(z.size, m).mean(axis=1) * 2 * np.pi
        return 0.5 * np.log(1.0 / np.maximum(np.abs(z), 1e-300)) * ring

    return float(tanh_sinh_arcs(f, [(-1.0, 0.0), (0.0, 1.0)], 1e-9, max_level=9).value)


def c1_base(p_linear: MultiPoly, omega: KernelSpec) -> float:
    """||Omega||_1 + int log(||P||^{1/2} / |P(x')|^{1/2}) |Omega| for linear P."""
    if p_linear.degree > 1:
        raise ValueError("c1_base needs a polynomial of degree <= 1")
    b = np.zeros(p_linear.dim)
    for e, v in p_linear.terms.items():
        if sum(e) == 1:
            b[e.index(1)] += v
    if not np.any(b):
        raise ZeroLinearForm("linear part vanishes")
    return float(omega.l1 + _linear_log_integral(b, omega))


# --------------------------------------------------------------------------
# the ladder


def _linear_of(h: HomogeneousParts) -> MultiPoly | None:
    q = h.parts.get(1)
    return None if q is None or q.is_zero() else q


def certificate(p: MultiPoly, omega: KernelSpec, R: float = math.inf, grid_order: int = 96,
                measure: bool = True, measure_tol: float = 1e-5, max_evals: int = 8000) -> Certificate:
    """Run the ladder d = 2^m, 2^{m-1}, ..., 1 and sum every term."""
    if omega.dim != p.dim:
        raise ValueError("kernel and polynomial dimensions differ")
    h0 = homogeneous_parts(p)
    m = max(0, math.ceil(math.log2(h0.degree))) if h0.degree > 1 else 0
    D = 1 << m
    h = HomogeneousParts(h0.parts, h0.sup_norms, h0.dim, D, 0.0, h0.tol)
    grid = _grid(p.dim, grid_order)
    ladder, levels = [], []
    diag: dict = {"unbounded_rays": 0}
    while h.degree >= 2:
        ladder.append(h.degree)
        if not any(m > 0 for m in _top_half(h).values()):
            levels.append(LevelTerms(h.degree, 1.0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, skipped=True))
            h = h.low_part()
            continue
        g, lam = normalize_dilation(h)
        i1 = i1_term(g, omega)
        det = i2_details(g, omega, R, grid)
        pw, ll, ok = young_decompose(g, omega, grid)
        levels.append(LevelTerms(g.degree, lam, g.diagnostics["j0"], i1, det["vdc_part"],
                                 det["sublevel_part"], pw, ll, det["vdc_reference"],
                                 paper_log_term(g, omega, grid), ok))
        diag["unbounded_rays"] += det["unbounded_rays"]
        h = g.low_part()
    ladder.append(1)
    lin = _linear_of(h) if h.degree >= 1 else None
    base = c1_base(lin, omega) if lin is not None else 0.0
    total = float(sum(lv.total for lv in levels) + base)
    cert = Certificate(ladder, levels, base, total, diagnostics=diag)
    if measure:
        est = In(p, omega, tol=measure_tol, max_evals=max_evals)
        cert.measured = float(abs(est.value))
        cert.measured_error = float(est.abs_error_estimate)
        cert.ratio = cert.measured / total if total > 0 else math.inf
        diag["measured_converged"] = bool(est.converged)
    return cert
