"""Polynomials: dense univariate, sparse multivariate, ray decomposition and
certified real-root isolation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import _roots
from .errors import ConstantPolynomial, NumericalError, ZeroPolynomial


@dataclass(frozen=True, eq=False)
class Poly:
    """P(x) = sum_k coeffs[k] x^k, trailing zeros trimmed."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    def __call__(self, x):
        return eval_poly(self, x)

    def __eq__(self, other):
        return isinstance(other, Poly) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()})"

    def __neg__(self):
        return Poly(-self.coeffs)

    def __add__(self, other):
        if isinstance(other, Poly):
            n = max(self.coeffs.size, other.coeffs.size)
            c = np.zeros(n)
            c[: self.coeffs.size] += self.coeffs
            c[: other.coeffs.size] += other.coeffs
            return Poly(c)
        c = self.coeffs.copy()
        c[0] += float(other)
        return Poly(c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return Poly(self.coeffs * float(s))

    __rmul__ = __mul__

    def dilate(self, lam: float) -> "Poly":
        """x -> P(lam x)."""
        return Poly(self.coeffs * lam ** np.arange(self.coeffs.size))

    def reflect(self) -> "Poly":
        """x -> P(-x)."""
        return self.dilate(-1.0)

    def to_json(self) -> str:
        return json.dumps(self.coeffs.tolist())

    @classmethod
    def from_json(cls, text: str) -> "Poly":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(v, (int, float)) for v in data):
            raise ValueError("Poly JSON must be an array of numbers, constant term first")
        return cls(data)

    @classmethod
    def monomial(cls, k: int, coef: float = 1.0) -> "Poly":
        c = np.zeros(k + 1)
        c[k] = coef
        return cls(c)


def eval_poly(p: Poly, x):
    """Horner evaluation; x may be a scalar or an array."""
    c = p.coeffs
    x = np.asarray(x, dtype=float)
    s = np.full(x.shape, c[-1])
    for k in range(c.size - 2, -1, -1):
        s = s * x + c[k]
    return float(s) if s.ndim == 0 else s


def derivative(p: Poly) -> Poly:
    c = p.coeffs
    if c.size == 1:
        return Poly([0.0])
    return Poly(c[1:] * np.arange(1, c.size))


def antiderivative(p: Poly, const: float = 0.0) -> Poly:
    c = p.coeffs
    return Poly(np.concatenate([[const], c / np.arange(1, c.size + 1)]))


def nth_derivative(p: Poly, k: int) -> Poly:
    for _ in range(k):
        p = derivative(p)
    return p


# --------------------------------------------------------------------------
# multivariate


Exponent = tuple


@dataclass(frozen=True, eq=False)
class MultiPoly:
    """Sparse polynomial on R^dim: {exponent tuple: coefficient}."""

    terms: dict
    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dim}")
        merged: dict[tuple, float] = {}
        for e, v in dict(self.terms).items():
            e = tuple(int(k) for k in e)
            if len(e) != self.dim or min(e) < 0:
                raise ValueError(f"bad exponent {e} for dimension {self.dim}")
            merged[e] = merged.get(e, 0.0) + float(v)
        merged = {e: v for e, v in sorted(merged.items()) if v != 0.0}
        object.__setattr__(self, "terms", merged)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self, j: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (j is None or degs == {j})

    def __repr__(self):
        return f"MultiPoly({self.terms}, dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, tuple(self.terms.items())))

    def __neg__(self):
        return MultiPoly({e: -v for e, v in self.terms.items()}, self.dim)

    def __add__(self, other: "MultiPoly"):
        t = dict(self.terms)
        for e, v in other.terms.items():
            t[e] = t.get(e, 0.0) + v
        return MultiPoly(t, self.dim)

    def __mul__(self, s):
        return MultiPoly({e: v * float(s) for e, v in self.terms.items()}, self.dim)

    __rmul__ = __mul__

    def dilate(self, lam: float) -> "MultiPoly":
        """x -> P(lam x)."""
        return MultiPoly({e: v * lam ** sum(e) for e, v in self.terms.items()}, self.dim)

    def arrays(self):
        if not self.terms:
            return np.zeros((0, self.dim), dtype=np.int64), np.zeros(0)
        E = np.array(list(self.terms.keys()), dtype=np.int64).reshape(-1, self.dim)
        return E, np.array(list(self.terms.values()))

    def __call__(self, pts):
        """Evaluate at points of shape (..., dim) (or scalars when dim == 1)."""
        pts = np.asarray(pts, dtype=float)
        if self.dim == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        shape = pts.shape[:-1]
        X = pts.reshape(-1, self.dim)
        E, coef = self.arrays()
        out = np.zeros(X.shape[0])
        if coef.size:
            deg = int(E.max())
            step = max(1, 2_000_000 // max(coef.size, 1))
            for s in range(0, X.shape[0], step):
                xs = X[s : s + step]
                acc = np.ones((xs.shape[0], coef.size))
                for i in range(self.dim):
                    pw = xs[:, i, None] ** np.arange(deg + 1)
                    acc *= pw[:, E[:, i]]
                out[s : s + step] = acc @ coef
        out = out.reshape(shape)
        return float(out) if out.ndim == 0 else out

    def to_text(self) -> str:
        lines = []
        for e, v in self.terms.items():
            lines.append(" ".join([repr(v)] + [str(k) for k in e]))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, dim: int | None = None) -> "MultiPoly":
        """Parse lines of ``coef e1 ... en``; blank lines and ``#`` comments skipped."""
        terms: dict = {}
        n = dim
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                coef = float(parts[0])
                exps = tuple(int(x) for x in parts[1:])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}") from exc
            if n is None:
                n = len(exps)
            if len(exps) != n:
                raise ValueError(f"line {lineno}: expected {n} exponents, got {len(exps)}")
            terms[exps] = terms.get(exps, 0.0) + coef
        if n is None:
            raise ValueError("empty polynomial text and no dimension given")
        return cls(terms, n)

    @classmethod
    def from_poly(cls, p: Poly) -> "MultiPoly":
        return cls({(k,): v for k, v in enumerate(p.coeffs)}, 1)


def sphere_points(n: int, *, n_theta: int, n_phi: int | None = None) -> np.ndarray:
    """Regular parameter grid on S^{n-1} (not a quadrature rule)."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        t = 2 * np.pi * np.arange(n_theta) / n_theta
        return np.column_stack([np.cos(t), np.sin(t)])
    n_phi = n_phi or 2 * n_theta
    th = np.pi * (np.arange(n_theta) + 0.5) / n_theta
    ph = 2 * np.pi * np.arange(n_phi) / n_phi
    T, F = np.meshgrid(th, ph, indexing="ij")
    pts = np.column_stack([(np.sin(T) * np.cos(F)).ravel(), (np.sin(T) * np.sin(F)).ravel(), np.cos(T).ravel()])
    return np.vstack([pts, [[0, 0, 1.0], [0, 0, -1.0]]])


def sphere_sup_norm(q: MultiPoly, rel_tol: float = 1e-10) -> float:
    """max |q| over the unit sphere, by grid search plus local refinement."""
    if q.is_zero():
        return 0.0
    n = q.dim
    j = max(q.degree, 1)
    if n == 1:
        return float(np.max(np.abs(q(np.array([[1.0], [-1.0]])))))
    if n == 2:
        m = 8 * (j + 1) + 8
        t = 2 * np.pi * np.arange(m) / m
        vals = np.abs(q(np.column_stack([np.cos(t), np.sin(t)])))
        f = lambda s: -abs(q(np.array([math.cos(s), math.sin(s)])))
        best = float(vals.max())
        h = 2 * np.pi / m
        peaks = np.flatnonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))
        for i in peaks:
            r = minimize_scalar(f, bounds=(t[i] - h, t[i] + h), method="bounded",
                                options={"xatol": 1e-12})
            best = max(best, -float(r.fun))
        return best
    # n == 3: polar x azimuth grid, then local ascent from the grid peaks
    nt = 4 * (j + 1) + 4
    pts = sphere_points(3, n_theta=nt, n_phi=2 * nt)
    vals = np.abs(q(pts))
    order = np.argsort(vals)[::-1][: max(8, 2 * j)]

    def f(ang):
        th, ph = ang
        x = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
        return -abs(q(x))

    best = float(vals.max())
    for i in order:
        x, y, z = pts[i]
        th0 = math.acos(max(-1.0, min(1.0, z)))
        ph0 = math.atan2(y, x)
        r = minimize(f, [th0, ph0], method="Nelder-Mead",
                     options={"xatol": 1e-11, "fatol": rel_tol * best, "maxiter": 4000})
        best = max(best, -float(r.fun))
    return best


@dataclass(frozen=True, eq=False)
class HomogeneousParts:
    """P(r x') = sum_j parts[j](x') r^j with the constant term split off."""

    parts: dict
    sup_norms: dict
    dim: int
    degree: int
    constant: float = 0.0
    tol: float = 1e-10
    diagnostics: dict = field(default_factory=dict)

    def multipoly(self) -> MultiPoly:
        t: dict = {}
        for q in self.parts.values():
            t.update(q.terms)
        if self.constant:
            t[(0,) * self.dim] = self.constant
        return MultiPoly(t, self.dim)

    def coefficient_matrix(self, directions) -> np.ndarray:
        """Row i holds the ray polynomial coefficients for directions[i]."""
        D = np.asarray(directions, dtype=float).reshape(-1, self.dim)
        C = np.zeros((D.shape[0], self.degree + 1))
        for j, q in self.parts.items():
            C[:, j] = q(D)
        return C

    def top_half_max(self) -> tuple[int, float]:
        """(j0, m_j0) maximizing m_j over d/2 < j <= d."""
        d = self.degree
        cands = [(self.sup_norms.get(j, 0.0), j) for j in range(d // 2 + 1, d + 1)]
        m, j0 = max(cands)
        return j0, m

    def low_part(self) -> "HomogeneousParts":
        """Q = sum_{j <= d/2} P_j as a decomposition of nominal degree d/2."""
        half = self.degree // 2
        parts = {j: q for j, q in self.parts.items() if j <= half}
        return HomogeneousParts(parts, {j: self.sup_norms[j] for j in parts}, self.dim,
                                max(half, 1) if self.degree > 1 else 0, 0.0, self.tol)

    def dilate(self, lam: float) -> "HomogeneousParts":
        parts = {j: q * lam ** j for j, q in self.parts.items()}
        sups = {j: m * abs(lam) ** j for j, m in self.sup_norms.items()}
        return HomogeneousParts(parts, sups, self.dim, self.degree, self.constant, self.tol,
                                dict(self.diagnostics))


def homogeneous_parts(p: MultiPoly, tol: float = 1e-10, degree: int | None = None) -> HomogeneousParts:
    """Group terms of p by total degree; the constant term is dropped."""
    groups: dict[int, dict] = {}
    const = 0.0
    for e, v in p.terms.items():
        j = sum(e)
        if j == 0:
            const = v
            continue
        groups.setdefault(j, {})[e] = v
    if not groups:
        raise ConstantPolynomial("polynomial is constant: no oscillation to measure")
    parts = {j: MultiPoly(t, p.dim) for j, t in sorted(groups.items())}
    sups = {j: sphere_sup_norm(q, tol) for j, q in parts.items()}
    d = max(degree or 0, p.degree)
    return HomogeneousParts(parts, sups, p.dim, d, const, tol, {"dropped_constant": const})


def radial_restriction(h: HomogeneousParts, direction) -> Poly:
    x = np.asarray(direction, dtype=float).ravel()
    if x.size != h.dim or abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector of matching dimension")
    return Poly(h.coefficient_matrix(x[None, :])[0])


# --------------------------------------------------------------------------
# root isolation


class RootEnclosure(NamedTuple):
    lo: float
    hi: float
    touch: bool = False  # unresolved even-multiplicity cluster (tangency)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


def _exact_sign(coeffs: Sequence[Fraction], x: float) -> int:
    xf = Fraction(x)
    s = Fraction(0)
    for c in reversed(coeffs):
        s = s * xf + c
    return (s > 0) - (s < 0)


def _sign(c: np.ndarray, cf, x: float) -> int:
    val, bnd = _roots.eval_bound(c, x)
    if abs(val) > bnd:
        return 1 if val > 0 else -1
    return _exact_sign(cf, x)


def _exact_bernstein(cf, u: float, v: float) -> list:
    n = len(cf) - 1
    uf, w = Fraction(u), Fraction(v) - Fraction(u)
    a = list(cf)
    for k in range(n):
        for j in range(n - 1, k - 1, -1):
            a[j] += uf * a[j + 1]
    bb = [a[k] * w**k / math.comb(n, k) for k in range(n + 1)]
    return [sum(math.comb(i, k) * bb[k] for k in range(i + 1)) for i in range(n + 1)]


def _bernstein_signs(c, cf, u, v, su, sv) -> list[int]:
    beta, err = _roots.bernstein(c, u, v)
    if not np.all(np.isfinite(beta)):
        return None
    signs = np.where(beta > err, 1, np.where(beta < -err, -1, 0))
    inner = signs[1:-1]
    if np.any(inner == 0):
        signs = [(b > 0) - (b < 0) for b in _exact_bernstein(cf, u, v)]
    signs = list(int(s) for s in signs)
    signs[0], signs[-1] = su, sv
    return signs


def _variations(signs: list[int]) -> int:
    s = [x for x in signs if x != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def root_bound(p: Poly) -> float:
    """Fujiwara bound: every complex root z satisfies |z| <= bound."""
    c = p.coeffs
    d = p.degree
    if d == 0:
        return 0.0
    lead = abs(c[-1])
    vals = [(abs(c[d - k]) / lead) ** (1.0 / k) for k in range(1, d)]
    vals.append((abs(c[0]) / (2 * lead)) ** (1.0 / d))
    return 2.0 * max(vals) * (1 + 1e-12)


def isolate_roots(p: Poly, interval=(-math.inf, math.inf), tol: float = 1e-12) -> list[RootEnclosure]:
    """Disjoint enclosures of the distinct real roots of p in the closed interval.

    Counting uses Descartes' rule of signs on Bernstein coefficients; signs
    that the floating-point error bound cannot decide are recomputed exactly
    with rational arithmetic.  Enclosure width is at most tol * max(1, |root|).
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot isolate roots of the zero polynomial")
    if p.degree == 0:
        return []
    a, b = float(interval[0]), float(interval[1])
    B = root_bound(p)
    lo_lim, hi_lim = max(a, -B - 1.0), min(b, B + 1.0)
    if lo_lim > hi_lim:
        return []
    c = np.ascontiguousarray(p.coeffs)
    cf = [Fraction(x) for x in c]
    out: list[RootEnclosure] = []
    s_lo, s_hi = _sign(c, cf, lo_lim), _sign(c, cf, hi_lim)
    if s_lo == 0:
        out.append(RootEnclosure(lo_lim, lo_lim))
    if hi_lim > lo_lim and s_hi == 0:
        out.append(RootEnclosure(hi_lim, hi_lim))
    if hi_lim == lo_lim:
        return out
    stack = [(lo_lim, hi_lim, s_lo, s_hi)]
    while stack:
        u, v, su, sv = stack.pop()
        signs = _bernstein_signs(c, cf, u, v, su, sv)
        width_ok = v - u <= tol * max(1.0, abs(u), abs(v))
        if signs is None:
            if width_ok:
                raise NumericalError(f"overflow isolating roots near [{u}, {v}]")
            var = 2
        else:
            var = _variations(signs)
        if var == 0:
            continue
        if var == 1 and su != 0 and sv != 0:
            lo, hi = u, v
            while True:
                lo, hi, amb = _roots.bisect(c, lo, hi, float(su), tol)
                if math.isnan(amb):
                    break
                s = _exact_sign(cf, amb)
                if s == 0:
                    lo = hi = amb
                    break
                if s == su:
                    lo = amb
                else:
                    hi = amb
            out.append(RootEnclosure(lo, hi))
            continue
        if width_ok:
            # unresolved cluster; an odd count means a sign change inside
            if su != sv and su != 0 and sv != 0:
                out.append(RootEnclosure(u, v))
            else:
                out.append(RootEnclosure(u, v, touch=True))
            continue
        m = 0.5 * (u + v) if u <= 0 or v / u < 4 else math.sqrt(u * v)
        sm = _sign(c, cf, m)
        if sm == 0:
            out.append(RootEnclosure(m, m))
        stack.append((m, v, sm, sv))
        stack.append((u, m, su, sm))
    out.sort()
    return _merge(out)


def _merge(encs: list[RootEnclosure]) -> list[RootEnclosure]:
    merged: list[RootEnclosure] = []
    for e in encs:
        if merged and e.lo <= merged[-1].hi:
            last = merged[-1]
            merged[-1] = RootEnclosure(last.lo, max(last.hi, e.hi), last.touch and e.touch)
        else:
            merged.append(e)
    return merged


def ray_matrix(p: MultiPoly, directions) -> np.ndarray:
    """Row i: coefficients of r -> P(r x_i) - P(0) for unit vectors x_i."""
    D = np.asarray(directions, dtype=float).reshape(-1, p.dim)
    E, coef = p.arrays()
    deg = E.sum(axis=1) if coef.size else np.zeros(0, dtype=np.int64)
    C = np.zeros((D.shape[0], max(p.degree, 1) + 1))
    if not coef.size:
        return C
    S = np.zeros((coef.size, C.shape[1]))
    S[np.arange(coef.size), deg] = coef
    S[:, 0] = 0.0
    top = int(E.max())
    mono = np.ones((D.shape[0], coef.size))
    for i in range(p.dim):
        pw = D[:, i, None] ** np.arange(top + 1)
        mono *= pw[:, E[:, i]]
    return mono @ S


def top_part(p: MultiPoly) -> MultiPoly:
    d = p.degree
    return MultiPoly({e: v for e, v in p.terms.items() if sum(e) == d}, p.dim)


def binary_form_zeros(beta: np.ndarray, period: float) -> list[float]:
    """Zeros of B(theta) = sum_k beta[k] cos^{d-k}(theta) sin^k(theta) in [0, period).

    period is pi or 2 pi; the forms are homogeneous so zeros repeat every pi.
    """
    beta = np.asarray(beta, dtype=float)
    if not np.any(beta):
        raise ValueError("binary form vanishes identically")
    base = [math.atan(e.mid) % math.pi for e in isolate_roots(Poly(beta), (-math.inf, math.inf))]
    if beta[-1] == 0.0:
        base.append(0.5 * math.pi)
    zs = sorted(set(base))
    if period > math.pi + 1e-12:
        zs = zs + [z + math.pi for z in zs]
    return zs
