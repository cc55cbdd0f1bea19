"""Independent brute-force oracles used only by the test suite.

None of these share code paths with the package: roots come from np.roots,
integrals from plain midpoint or trapezoid sums over dense grids.
"""
from __future__ import annotations

import math

import numba
import numpy as np


# --------------------------------------------------------------------------
# sign-scan oracle for log-measures of sublevel sets


def fujiwara_cap(coeffs: np.ndarray, alpha: float) -> float:
    """Upper bound for every real root of P - alpha and P + alpha (ascending coefficients)."""
    c = np.array(coeffs, float)
    d = c.size - 1
    while d > 0 and c[d] == 0:
        d -= 1
    out = 1.0
    for s in (-alpha, alpha):
        cc = c[: d + 1].copy()
        cc[0] += s
        lead = abs(cc[d])
        b = [abs(cc[d - k] / lead) ** (1.0 / k) for k in range(1, d)]
        b.append(abs(cc[0] / (2 * lead)) ** (1.0 / d))
        out = max(out, 2.0 * max(b))
    return out


@numba.njit(cache=True)
def _scan(c, alpha, L, m):
    # trapezoid of the indicator of |P(e^t)| <= alpha on t in [0, L]; at a sign
    # change the crossing is placed by linear interpolation of |P| - alpha
    h = L / (m - 1)
    d = c.size - 1
    total = 0.0
    prev = 0.0
    step = math.exp(h)
    x = 1.0
    for i in range(m):
        if i % 4096 == 0:
            x = math.exp(i * h)  # resync the geometric recurrence
        else:
            x *= step
        v = c[d]
        for k in range(d - 1, -1, -1):
            v = v * x + c[k]
        g = abs(v) - alpha
        if i > 0:
            if prev <= 0.0 and g <= 0.0:
                total += h
            elif prev <= 0.0 or g <= 0.0:
                frac = prev / (prev - g)  # where g crosses zero, in [0, 1]
                total += h * (frac if prev <= 0.0 else 1.0 - frac)
        prev = g
    return total


def log_measure_scan(coeffs, alpha: float, points: int = 10_000_000) -> float:
    """int_{x >= 1, |P(x)| <= alpha} dx / x by scanning t = log x on a uniform grid."""
    cap = fujiwara_cap(coeffs, alpha)
    L = math.log(cap) * 1.01 + 1e-3
    return float(_scan(np.asarray(coeffs, float), float(alpha), L, int(points)))


# --------------------------------------------------------------------------
# graded oracle for sphere integrals on S^1


def binary_zeros_np(beta: np.ndarray) -> np.ndarray:
    """Zeros in [0, 2 pi) of sum beta[k] cos^{d-k} t sin^k t, via np.roots in tan t."""
    beta = np.asarray(beta, float)
    d = beta.size - 1
    zs = []
    nz = np.flatnonzero(beta)
    # roots in u = tan t of sum beta[k] u^k; a vanishing top coefficient means cos t = 0 is a zero
    if nz.size and nz[-1] < d:
        zs.append(math.pi / 2)
    if nz.size and nz[-1] > 0:
        r = np.roots(beta[: nz[-1] + 1][::-1])
        for u in r[np.abs(r.imag) < 1e-9].real:
            zs.append(math.atan(u) % math.pi)
    zs = np.sort(np.array(zs) % math.pi)
    return np.concatenate([zs, zs + math.pi])


@numba.njit(cache=True)
def _graded_arc(beta, M, e, a, b, m, g):
    # midpoint rule in u after t = a + (b - a) w(u), w(u) = u^g / (u^g + (1-u)^g)
    d = beta.size - 1
    s = 0.0
    for i in range(m):
        u = (i + 0.5) / m
        p, q = u**g, (1.0 - u) ** g
        w = p / (p + q)
        dw = g * (u ** (g - 1) * q + p * (1.0 - u) ** (g - 1)) / (p + q) ** 2
        t = a + (b - a) * w
        ct, st = math.cos(t), math.sin(t)
        v = 0.0
        for k in range(d + 1):
            v += beta[k] * ct ** (d - k) * st**k
        v = abs(v)
        if v > 0.0:
            s += (M / v) ** e * dw
    return s * (b - a) / m


def polweight_oracle_2d(beta: np.ndarray, points: int = 2_000_000, grade: float = 4.0) -> float:
    """int_0^{2 pi} (M / |B(t)|)^{1/2k} dt, M = max |B| found on a dense grid near-maximum."""
    beta = np.asarray(beta, float)
    k = beta.size - 1
    t = np.linspace(0.0, 2 * math.pi, 200_001)
    vals = np.abs(sum(beta[j] * np.cos(t) ** (k - j) * np.sin(t) ** j for j in range(k + 1)))
    i = int(np.argmax(vals))
    # polish the maximum with a few golden-section steps around the grid peak
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
    f = lambda x: -abs(sum(beta[j] * math.cos(x) ** (k - j) * math.sin(x) ** j for j in range(k + 1)))
    gr = (math.sqrt(5) - 1) / 2
    for _ in range(80):
        x1, x2 = hi - gr * (hi - lo), lo + gr * (hi - lo)
        if f(x1) < f(x2):
            hi = x2
        else:
            lo = x1
    M = max(float(vals[i]), -f(0.5 * (lo + hi)))
    zs = [z for z in binary_zeros_np(beta) if 0.0 <= z < 2 * math.pi]
    pts = np.unique(np.concatenate([[0.0, 2 * math.pi], zs]))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        m = max(int(points * (b - a) / (2 * math.pi)), 1000)
        total += _graded_arc(beta, M, 1.0 / (2 * k), a, b, m, grade)
    return float(total)


# --------------------------------------------------------------------------
# dense quadrature for oscillatory segments


def simpson_segment(p_coeffs, a: float, b: float, weight: str = "1/x", points: int = 10_000_001) -> complex:
    """Composite Simpson for int_a^b e^{iP(x)} w(x) dx."""
    if points % 2 == 0:
        points += 1
    x = np.linspace(a, b, points)
    ph = np.polynomial.polynomial.polyval(x, np.asarray(p_coeffs, float))
    f = np.exp(1j * ph)
    if weight == "1/x":
        f = f / x
    h = (b - a) / (points - 1)
    return complex(h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum()))
