"""Principal-value oscillatory integrals p.v. int e^{iP(x)} Omega(x/|x|) |x|^{-n} dx.

The radial integral along each ray is split at r = 1:

    F(x') = int_0^1 (e^{iP(r x')} - 1) dr/r + int_1^inf e^{iP(r x')} dr/r

and the angular integral of Omega * F is taken with rules that are split at
the zeros of the top homogeneous part, where F has logarithmic singularities.
Subtracting 1 is harmless because Omega has zero mean; the angular rules
enforce that mean exactly on their own nodes, which makes the result exactly
invariant under dilations of P.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import sici

from . import _engine
from .errors import (ConstantPolynomial, DegenerateRays, NonconvergedPanel, NotOdd,
                     StationaryTail)
from .kernels import KernelSpec
from .poly import MultiPoly, Poly, binary_form_zeros, derivative, isolate_roots, ray_matrix, top_part
from .quadrature import adaptive_gauss, periodic_trapezoid

INNER_TOL = 1e-10
TAIL_TOL = 1e-7
_GOLDEN = 0.6180339887498949


@dataclass
class PvEstimate:
    value: complex
    abs_error_estimate: float
    epsilons_used: tuple = ()
    radii_used: tuple = ()
    converged: bool = True
    method: str = ""
    diagnostics: dict = field(default_factory=dict)

    def __abs__(self):
        return abs(self.value)


def _check_ray(c: np.ndarray) -> np.ndarray:
    c = np.ascontiguousarray(c, dtype=float)
    if c.size and c[0] != 0.0:
        raise ValueError("ray polynomial must have zero constant term")
    return c


def osc_segment(p: Poly, a: float, b: float, weight: str = "1/x", tol: float = INNER_TOL) -> complex:
    """int_a^b e^{iP(x)} w(x) dx with w = 1/x or 1."""
    if weight not in ("1/x", "1"):
        raise ValueError("weight must be '1/x' or '1'")
    if weight == "1/x" and not 0 < a:
        raise ValueError("weight 1/x needs 0 < a")
    if b < a:
        return -osc_segment(p, b, a, weight, tol)
    c = np.ascontiguousarray(p.coeffs, dtype=float)
    dc = np.ascontiguousarray(derivative(p).coeffs, dtype=float)
    mode = _engine.MODE_INV if weight == "1/x" else _engine.MODE_ONE
    val, err, ok, panels = _engine.integrate_finite(c, dc, float(a), float(b), mode, tol)
    if not ok:
        raise NonconvergedPanel(f"subdivision cap reached on [{a}, {b}]", panel=(a, b))
    return complex(val)


def osc_tail(p: Poly, a: float, tol: float = INNER_TOL) -> complex:
    """int_a^inf e^{iP(x)} dx/x for a > 0 and deg P >= 1."""
    if not a > 0:
        raise ValueError("need a > 0")
    if p.degree < 1:
        raise ValueError("a constant phase gives a divergent tail")
    c = np.ascontiguousarray(p.coeffs, dtype=float)
    dc = np.ascontiguousarray(derivative(p).coeffs, dtype=float)
    val, err, ok, panels, _ = _engine.integrate_to_inf(c, dc, float(a), tol)
    if not ok:
        raise NonconvergedPanel(f"tail integral from {a} did not converge", panel=(a, math.inf))
    return complex(val)


def radial_regularized(p_ray: Poly, R: float = math.inf, tol: float = INNER_TOL) -> complex:
    """int_0^1 (e^{iP}-1) dr/r + int_1^R e^{iP} dr/r for P(0) = 0."""
    c = _check_ray(p_ray.coeffs)
    if p_ray.is_zero():
        return complex(math.log(R)) if math.isfinite(R) else complex(math.inf)
    val, err, ok, _ = _engine.radial_value(c, float(R), tol)
    if not ok:
        raise NonconvergedPanel("radial integral did not converge", panel=(0.0, R))
    return complex(val)


def radial_values(C: np.ndarray, R: float = math.inf, tol: float = INNER_TOL):
    """F for every row of a ray coefficient matrix: (values, errors, ok flags)."""
    C = np.ascontiguousarray(C, dtype=float)
    return _engine.radial_batch(C, float(R), tol)


# --------------------------------------------------------------------------
# one dimension


def _pv_ray(p: Poly, tol: float):
    b0 = float(p.coeffs[0])
    c = p.coeffs.copy()
    c[0] = 0.0
    cm = c * (-1.0) ** np.arange(c.size)
    vals, errs, oks = radial_values(np.vstack([c, cm]), math.inf, tol)
    return complex(np.exp(1j * b0) * (vals[0] - vals[1])), float(errs.sum()), bool(oks.all())


def pv_1d(p: Poly, tol: float = INNER_TOL, method: str = "ray") -> PvEstimate:
    """p.v. int_R e^{iP(x)} dx/x.

    method="ray": the two half-lines are regularized at r = 1 and the tails
    closed analytically past the last turning point.
    method="ladder": paired integrand on [0, 1], then partial integrals at
    phase-aligned cutoffs on each half-line, accelerated by repeated
    averaging of consecutive partial values.
    """
    if p.degree == 0:
        return PvEstimate(0j, 0.0, (0.0,), (), True, method, {"constant": True})
    if method == "ray":
        val, err, ok = _pv_ray(p, tol)
        return PvEstimate(val, err, (0.0,), (math.inf,), ok, "ray")
    if method == "ladder":
        return _pv_ladder(p, tol)
    raise ValueError(f"unknown method {method!r}")


def _last_turning_point(p: Poly) -> float:
    dp = derivative(p)
    if dp.degree == 0:
        return 0.0
    rs = isolate_roots(dp, (0.0, math.inf))
    return max((e.hi for e in rs), default=0.0)


def _aligned_cutoffs(p: Poly, start: float, count: int) -> list[float]:
    """Points R_k > start with P(R_k) = P(start') + k pi, P monotone beyond start."""
    from scipy.optimize import brentq

    s = math.copysign(1.0, p.coeffs[-1])
    x0 = start
    base = p(x0)
    out = []
    hi = x0
    for k in range(1, count + 1):
        target = base + s * k * math.pi
        g = lambda x: p(x) - target
        while g(hi) * s < 0:
            hi = 2 * hi + 1.0
        lo = out[-1] if out else x0
        out.append(brentq(g, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500))
    return out


def _averaged_tail(p: Poly, tol: float, levels: int = 6, cutoffs: int = 16):
    """int_1^inf e^{iP} dx/x for deg P >= 1, by ladder averaging."""
    start = max(1.0, 1.5 * _last_turning_point(p) + 1.0)
    # move on until the phase increment per unit log-length is large enough
    while abs(start * derivative(p)(start)) < 20.0:
        start *= 2.0
    head = osc_segment(p, 1.0, start, "1/x", tol)
    Rs = _aligned_cutoffs(p, start, cutoffs)
    partial = [head]
    edges = [start] + Rs
    acc = head
    for u, v in zip(edges, edges[1:]):
        acc += osc_segment(p, u, v, "1/x", tol)
        partial.append(acc)
    seq = np.array(partial[1:])
    history = []
    for _ in range(levels):
        seq = 0.5 * (seq[1:] + seq[:-1])
        history.append(seq[-1])
    diffs = [abs(a - b) for a, b in zip(history[1:], history[:-1])]
    return complex(history[-1]), (diffs[-1] if diffs else math.inf), Rs


def _pv_ladder(p: Poly, tol: float) -> PvEstimate:
    b0 = float(p.coeffs[0])
    q = p - b0
    qm = q.reflect()
    # paired integrand (e^{iP(x)} - e^{iP(-x)})/x is bounded near 0
    c, cm = np.ascontiguousarray(q.coeffs), np.ascontiguousarray(qm.coeffs)
    dc, dcm = np.ascontiguousarray(derivative(q).coeffs), np.ascontiguousarray(derivative(qm).coeffs)
    head_p, _, ok1, _ = _engine.integrate_finite(c, dc, 0.0, 1.0, _engine.MODE_REG, tol)
    head_m, _, ok2, _ = _engine.integrate_finite(cm, dcm, 0.0, 1.0, _engine.MODE_REG, tol)
    tp, ep, Rp = _averaged_tail(q, tol)
    tm, em, Rm = _averaged_tail(qm, tol)
    val = np.exp(1j * b0) * ((head_p - head_m) + (tp - tm))
    err = ep + em
    return PvEstimate(complex(val), err, (0.0,), tuple(sorted(Rp + Rm)), bool(ok1 and ok2 and err < TAIL_TOL),
                      "ladder", {"cauchy_plus": ep, "cauchy_minus": em})


# --------------------------------------------------------------------------
# n dimensions


def _kernel_mean_fix(sums):
    # sums = [int Omega F, int Omega, int F, int 1] on the current rule
    s_of, s_o, s_f, s_1 = sums
    return s_of - (s_o / s_1) * s_f


def _top_beta_2d(top: MultiPoly) -> np.ndarray:
    d = top.degree
    beta = np.zeros(d + 1)
    for (a, b), v in top.terms.items():
        beta[b] += v
    return beta


def _top_beta_meridian(top: MultiPoly, phi: float) -> np.ndarray:
    d = top.degree
    beta = np.zeros(d + 1)
    c, s = math.cos(phi), math.sin(phi)
    for (e1, e2, e3), v in top.terms.items():
        beta[e1 + e2] += v * c**e1 * s**e2
    return beta


class _RayField:
    """F(x') with bookkeeping of radial failures."""

    def __init__(self, p: MultiPoly, tol: float, R: float = math.inf):
        self.p = p
        self.tol = tol
        self.R = R
        self.failed = 0
        self.max_err = 0.0
        self.evaluations = 0

    def __call__(self, X: np.ndarray) -> np.ndarray:
        C = ray_matrix(self.p, X)
        if np.any(~C[:, 1:].any(axis=1)):
            raise DegenerateRays("restricted phase vanishes identically on a quadrature direction")
        vals, errs, oks = radial_values(C, self.R, self.tol)
        self.failed += int((~oks).sum())
        self.max_err = max(self.max_err, float(errs.max(initial=0.0)))
        self.evaluations += X.shape[0]
        return vals


def _circle(theta):
    return np.column_stack([np.cos(theta), np.sin(theta)])


def _split_points_2d(p: MultiPoly, omega: KernelSpec, period: float) -> list[float]:
    zs = binary_form_zeros(_top_beta_2d(top_part(p)), period)
    zs += [s % period for s in omega.singular]
    return sorted(set(zs))


def _arcs_from_points(points, lo, hi):
    pts = sorted({x for x in points if lo < x < hi} | {lo, hi})
    return list(zip(pts[:-1], pts[1:]))


def _panel_error(d, s):
    # error of int Omega (F - panel mean of F), plus that of int Omega;
    # unchanged when F is shifted by a constant, as under dilations of P
    return abs(d[0] - d[1] * (s[2] / s[3])) + abs(d[1])


def _fixed_2d(omega: KernelSpec, field_: _RayField, points: int):
    """Offset trapezoid rule with a fixed point count; the error estimate is the
    change from the nested half-size rule."""
    t = (np.arange(points) + _GOLDEN) * 2 * math.pi / points
    X = _circle(t)
    om = omega(X)
    F = field_(X)
    V = np.column_stack([om * F, om, F, np.ones_like(om)])
    full = _kernel_mean_fix(V.sum(axis=0) * (2 * math.pi / points))
    half = _kernel_mean_fix(V[::2].sum(axis=0) * (4 * math.pi / points))
    return full, abs(full - half), False, points


def _integrate_2d(p: MultiPoly, omega: KernelSpec, tol: float, field_: _RayField, half: bool,
                  max_evals: int = 40000):
    if half:
        def f(t):
            X = _circle(t)
            return omega(X) * (field_(X) - field_(-X))

        zs = _split_points_2d(p, omega, math.pi)
        lo = -0.5 * math.pi
        pts = [((z + 0.5 * math.pi) % math.pi) - 0.5 * math.pi for z in zs]
        res = adaptive_gauss(f, _arcs_from_points(pts, lo, lo + math.pi), tol, max_evals=max_evals)
        return res.value, res.error, res.converged, res.evaluations

    def f(t):
        X = _circle(t)
        om = omega(X)
        F = field_(X)
        return np.column_stack([om * F, om, F, np.ones_like(om)])

    zs = _split_points_2d(p, omega, 2 * math.pi)
    if not zs:
        m0 = max(32, 8 * (p.degree + 1))
        res = periodic_trapezoid(f, tol, m0=m0, offset=_GOLDEN * 2 * math.pi / m0,
                                 correction=_kernel_mean_fix)
    else:
        arcs = _arcs_from_points(zs, zs[0], zs[0] + 2 * math.pi)
        res = adaptive_gauss(f, arcs, tol, max_evals=max_evals, correction=_kernel_mean_fix,
                             error_of=_panel_error)
    return res.value, res.error, res.converged, res.evaluations


def _meridian(p: MultiPoly, omega: KernelSpec, phi: float, tol: float, field_: _RayField, half: bool,
              max_evals: int = 20000):
    top = top_part(p)
    beta = _top_beta_meridian(top, phi)
    hi = 0.5 * math.pi if half else math.pi
    zs = [] if not np.any(beta) else binary_form_zeros(beta, math.pi)
    zs += [s for s in omega.singular_polar(phi)]
    arcs = _arcs_from_points(zs, 0.0, hi)
    cp, sp = math.cos(phi), math.sin(phi)

    def f(th):
        st = np.sin(th)
        X = np.column_stack([st * cp, st * sp, np.cos(th)])
        om = omega(X)
        if half:
            return (st * om * (field_(X) - field_(-X)))[:, None]
        F = field_(X)
        return np.column_stack([st * om * F, st * om, st * F, st])

    res = adaptive_gauss(f, arcs, tol, max_evals=max_evals, correction=lambda s: s[0],
                         error_of=None if half else _panel_error)
    return res.sums, res.converged, res.evaluations


def _integrate_3d(p: MultiPoly, omega: KernelSpec, tol: float, field_: _RayField, half: bool,
                  max_evals: int = 40000):
    m = max(8, 2 * (p.degree + 1) + 2 * omega.order)
    inner_tol = 0.05 * tol / (2 * math.pi)
    cache: dict[float, np.ndarray] = {}
    evals = 0
    ok_all = True
    prev = None
    combine = (lambda s: s[0]) if half else _kernel_mean_fix
    while True:
        phis = (np.arange(m) + _GOLDEN) * 2 * math.pi / m
        total = None
        for ph in phis:
            key = float(ph)
            if key not in cache:
                sums, ok, ne = _meridian(p, omega, key, inner_tol, field_, half,
                                         max(2000, max_evals // 2))
                cache[key] = sums
                ok_all = ok_all and ok
                evals += ne
            total = cache[key] if total is None else total + cache[key]
        cur = combine(total * (2 * math.pi / m))
        if prev is not None and abs(cur - prev) <= tol:
            return cur, abs(cur - prev), ok_all, evals
        if m >= 1024:
            return cur, (abs(cur - prev) if prev is not None else math.inf), False, evals
        prev = cur
        m *= 2


def _phase_offset(p: MultiPoly) -> tuple[MultiPoly, float]:
    z = (0,) * p.dim
    b0 = p.terms.get(z, 0.0)
    if b0:
        p = MultiPoly({e: v for e, v in p.terms.items() if e != z}, p.dim)
    return p, b0


def In(p: MultiPoly, omega: KernelSpec, tol: float | None = None, inner_tol: float = INNER_TOL,
       R_ladder=None, max_evals: int = 40000, rule: str = "adaptive", points: int = 256) -> PvEstimate:
    """p.v. int_{R^n} e^{iP(x)} Omega(x/|x|) |x|^{-n} dx for n = 1, 2, 3.

    ``R_ladder``: optional finite radii; the truncated integrals I_{0,R} are
    reported in diagnostics alongside the R = inf value.  ``max_evals`` caps
    the angular work (per meridian for n = 3).  ``rule="fixed"`` (n = 2 only)
    replaces the adaptive angular rule by a ``points``-node offset trapezoid
    rule: a cheap low-accuracy screen whose result is never marked converged.
    """
    if rule not in ("adaptive", "fixed"):
        raise ValueError("rule must be 'adaptive' or 'fixed'")
    if rule == "fixed" and (p.dim != 2 or points < 4 or points % 2):
        raise ValueError("the fixed rule needs n = 2 and an even point count >= 4")
    if omega.dim != p.dim:
        raise ValueError(f"kernel dimension {omega.dim} does not match polynomial dimension {p.dim}")
    if p.degree == 0:
        raise ConstantPolynomial("polynomial is constant: no oscillation to measure")
    tol = tol if tol is not None else 1e-6 * (omega.l1 + 1.0)
    q, b0 = _phase_offset(p)
    phase = complex(np.exp(1j * b0))
    diag: dict = {}
    out = _In_at(q, omega, tol, inner_tol, math.inf, max_evals, rule, points)
    val, err, ok, evals, field_ = out
    diag.update({"evaluations": evals, "radial_failures": field_.failed, "constant_phase": b0})
    radii = [math.inf]
    if R_ladder:
        ladder = []
        for R in R_ladder:
            v, e, _, _, _ = _In_at(q, omega, tol, inner_tol, float(R), max_evals, rule, points)
            ladder.append(phase * v)
        diag["ladder_values"] = ladder
        diag["ladder_cauchy"] = [abs(a - b) for a, b in zip(ladder[1:], ladder[:-1])]
        radii = [float(R) for R in R_ladder] + radii
    converged = ok and field_.failed == 0
    return PvEstimate(phase * val, float(err), (0.0,), tuple(radii), converged, "rays", diag)


def _In_at(q: MultiPoly, omega: KernelSpec, tol: float, inner_tol: float, R: float,
           max_evals: int = 40000, rule: str = "adaptive", points: int = 256):
    field_ = _RayField(q, inner_tol, R)
    n = q.dim
    if n == 1:
        X = np.array([[1.0], [-1.0]])
        om = omega(X)
        if np.any(om != 0):
            F = field_(X)
            val = complex(np.dot(om, F))
        else:
            val = 0j
        return val, field_.max_err * float(np.abs(om).sum()), True, 2, field_
    if n == 2 and rule == "fixed":
        val, err, ok, ev = _fixed_2d(omega, field_, points)
    elif n == 2:
        val, err, ok, ev = _integrate_2d(q, omega, tol, field_, False, max_evals)
    else:
        val, err, ok, ev = _integrate_3d(q, omega, tol, field_, False, max_evals)
    return complex(val), float(err), ok, ev, field_


def remark_odd(p: MultiPoly, omega: KernelSpec, tol: float | None = None,
               inner_tol: float = INNER_TOL, max_evals: int = 40000) -> PvEstimate:
    """I_n for odd Omega as a half-sphere integral of full-line p.v. integrals:
    I_n = int_{half} Omega(x') pv_1d(r -> P(r x')) dsigma."""
    if omega.dim != p.dim:
        raise ValueError("kernel and polynomial dimensions differ")
    if not omega.is_odd():
        raise NotOdd("kernel is not odd on the sphere")
    if p.degree == 0:
        raise ConstantPolynomial("polynomial is constant: no oscillation to measure")
    tol = tol if tol is not None else 1e-6 * (omega.l1 + 1.0)
    q, b0 = _phase_offset(p)
    field_ = _RayField(q, inner_tol)
    n = p.dim
    if n == 1:
        X = np.array([[1.0]])
        val = complex(omega(X)[0] * (field_(X)[0] - field_(-X)[0]))
        err, ok, ev = field_.max_err, True, 2
    elif n == 2:
        val, err, ok, ev = _integrate_2d(q, omega, tol, field_, True, max_evals)
    else:
        val, err, ok, ev = _integrate_3d(q, omega, tol, field_, True, max_evals)
    return PvEstimate(complex(np.exp(1j * b0) * val), float(err), (0.0,), (math.inf,),
                      bool(ok and field_.failed == 0), "remark_odd",
                      {"evaluations": ev, "radial_failures": field_.failed})


def c1_two_frequency(a: float, b: float, eps: float = 0.0, R: float = math.inf) -> complex:
    """int_eps^R (e^{iar} - e^{ibr}) dr/r in closed form via Si and Ci."""
    if a == 0 or b == 0:
        raise ValueError("frequencies must be nonzero")
    if not eps < R:
        raise ValueError("need eps < R")

    def part(w, x):
        # Ci(|w| x) + i sign(w) Si(|w| x); Ci dropped at x = 0 (handled below)
        if math.isinf(x):
            return 1j * math.copysign(0.5 * math.pi, w)
        if x == 0:
            return 0j
        si, ci = sici(abs(w) * x)
        return complex(ci, math.copysign(si, w))

    val = (part(a, R) - part(a, eps)) - (part(b, R) - part(b, eps))
    if eps == 0:
        # Ci(|a| e) - Ci(|b| e) -> log|a/b| as e -> 0
        val -= math.log(abs(a) / abs(b))
    return complex(val)


def result_record(poly, kernel: KernelSpec, n: int, est: PvEstimate) -> dict:
    """JSON record {poly, kernel, n, value_re, value_im, abs_err, ladder, converged}."""
    if isinstance(poly, Poly):
        ptxt = poly.coeffs.tolist()
    else:
        ptxt = poly.to_text()
    return {
        "poly": ptxt,
        "kernel": kernel.form,
        "n": n,
        "value_re": est.value.real,
        "value_im": est.value.imag,
        "abs_err": est.abs_error_estimate,
        "ladder": [r if math.isfinite(r) else "inf" for r in est.radii_used],
        "converged": bool(est.converged),
    }
