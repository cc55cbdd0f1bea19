"""Compiled helpers for certified real-root isolation.

Floating-point results come with forward error bounds; callers fall back to
exact rational arithmetic whenever a sign is not decided by the bound.
"""
import numpy as np
from numba import njit

_U = 1.1102230246251565e-16  # unit roundoff


@njit(cache=True)
def _taylor(c, x0):
    a = c.copy()
    n = a.shape[0]
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            a[j] += x0 * a[j + 1]
    return a


@njit(cache=True)
def bernstein(c, u, v):
    """Bernstein coefficients of P on [u, v] and an absolute error bound for each."""
    n = c.shape[0] - 1
    a = _taylor(c, u)
    aa = _taylor(np.abs(c), abs(u))
    w = v - u
    bb = np.empty(n + 1)
    ba = np.empty(n + 1)
    wk = 1.0
    binom = 1.0
    for k in range(n + 1):
        bb[k] = a[k] * wk / binom
        ba[k] = aa[k] * wk / binom
        wk *= w
        binom = binom * (n - k) / (k + 1)
    beta = np.empty(n + 1)
    err = np.empty(n + 1)
    gamma = 8.0 * (2 * n + 4) * _U
    for i in range(n + 1):
        s = 0.0
        sa = 0.0
        coef = 1.0
        for k in range(i + 1):
            s += coef * bb[k]
            sa += coef * ba[k]
            coef = coef * (i - k) / (k + 1)
        beta[i] = s
        err[i] = gamma * sa + 1e-300
    return beta, err


@njit(cache=True)
def eval_bound(c, x):
    """Horner value of P(x) with a rigorous-style forward error bound."""
    n = c.shape[0] - 1
    s = 0.0
    sa = 0.0
    ax = abs(x)
    for k in range(n, -1, -1):
        s = s * x + c[k]
        sa = sa * ax + abs(c[k])
    return s, 4.0 * (n + 2) * _U * sa


@njit(cache=True)
def bisect(c, lo, hi, slo, tol):
    """Shrink a sign-change bracket.  Returns (lo, hi, x_ambiguous).

    x_ambiguous is NaN unless bisection stopped at a point whose sign the
    floating-point bound cannot decide."""
    for _ in range(400):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            return lo, hi, np.nan
        x = 0.5 * (lo + hi)
        if x <= lo or x >= hi:
            return lo, hi, np.nan
        val, bnd = eval_bound(c, x)
        if abs(val) <= bnd:
            return lo, hi, x
        if (val > 0.0) == (slo > 0.0):
            lo = x
        else:
            hi = x
    return lo, hi, np.nan
