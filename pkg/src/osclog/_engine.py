"""Compiled kernels for integrals of the form int e^{iP(r)} w(r) dr.

Three integrand modes share one adaptive driver:

    MODE_INV  : e^{iP(r)} / r
    MODE_ONE  : e^{iP(r)}
    MODE_REG  : (e^{iP(r)} - 1) / r      (bounded at r = 0)

Panels whose phase variation is small are integrated with Gauss-Legendre;
long monotone stretches use Levin collocation, whose cost does not grow with
the number of oscillations.  The semi-infinite tail past the point where every
Taylor coefficient of P has the sign of the leading one is closed with the
first integration-by-parts term once r|P'(r)| is large.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MODE_INV = 0
MODE_ONE = 1
MODE_REG = 2

_GL_N = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_N)

_LEVIN_N = 16


def _cheb_lobatto(n):
    # nodes ordered from +1 down to -1
    N = n - 1
    x = np.cos(np.pi * np.arange(n) / N)
    c = np.ones(n)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n)
    X = np.tile(x, (n, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n))
    D -= np.diag(D.sum(axis=1))
    return x, D


_LV_X, _LV_D = _cheb_lobatto(_LEVIN_N)

_MAX_PANELS = 400_000
_MAX_DEPTH = 90
_TAIL_K = 1e6
_TAIL_TERMS = 8
_PHASE_GAUSS = 3.0 * np.pi
_TRIM = 1e-15


@njit(cache=True)
def horner(c, x):
    s = 0.0
    for k in range(c.shape[0] - 1, -1, -1):
        s = s * x + c[k]
    return s


@njit(cache=True)
def horner_d(c, x):
    p = 0.0
    dp = 0.0
    for k in range(c.shape[0] - 1, -1, -1):
        dp = dp * x + p
        p = p * x + c[k]
    return p, dp


@njit(cache=True)
def taylor(c, x0):
    """Coefficients of P(x0 + t) in powers of t."""
    a = c.copy()
    n = a.shape[0]
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            a[j] += x0 * a[j + 1]
    return a


@njit(cache=True)
def _weight(mode, r):
    if mode == MODE_ONE:
        return 1.0
    return 1.0 / r


@njit(cache=True)
def _gauss(c, u, v, mode):
    m = 0.5 * (u + v)
    h = 0.5 * (v - u)
    re = 0.0
    im = 0.0
    for k in range(_GL_N):
        r = m + h * _GL_X[k]
        ph = horner(c, r)
        w = _GL_W[k]
        if mode == MODE_REG:
            s = np.sin(0.5 * ph)
            re += w * (-2.0 * s * s) / r
            im += w * np.sin(ph) / r
        else:
            f = w * _weight(mode, r)
            re += f * np.cos(ph)
            im += f * np.sin(ph)
    return complex(re * h, im * h)


@njit(cache=True)
def _phase_err(ca, r):
    # forward error bound of Horner evaluation at r
    d = ca.shape[0] - 1
    return 2.0 * (d + 1) * 1.2e-16 * horner(ca, abs(r))


@njit(cache=True)
def _levin(c, dc, ca, u, v, mode):
    """Levin collocation on [u, v]; requires P' nonvanishing there.

    Returns (value, rounding-noise bound)."""
    n = _LEVIN_N
    m = 0.5 * (u + v)
    h = 0.5 * (v - u)
    if not (h > 0.0 and h > 1e-15 * abs(m)):
        return complex(0.0, 0.0), np.inf
    A = np.empty((n, n), dtype=np.complex128)
    rhs = np.empty(n, dtype=np.complex128)
    for i in range(n):
        r = m + h * _LV_X[i]
        dp = horner(dc, r)
        if not np.isfinite(dp):
            return complex(0.0, 0.0), np.inf
        for j in range(n):
            A[i, j] = _LV_D[i, j] / h
        A[i, i] += 1j * dp
        if mode == MODE_ONE:
            rhs[i] = 1.0
        else:
            rhs[i] = 1.0 / r
    p = np.linalg.solve(A, rhs)
    pv = horner(c, v)
    pu = horner(c, u)
    val = p[0] * np.exp(1j * pv) - p[n - 1] * np.exp(1j * pu)
    if mode == MODE_REG:
        val -= np.log(v / u)
    noise = abs(p[0]) * _phase_err(ca, v) + abs(p[n - 1]) * _phase_err(ca, u)
    return val, noise


@njit(cache=True)
def _classify(c, u, v):
    """Bernstein enclosure of P on [u, v].

    Returns (phase variation bound, lower bound of |P'|, or -1 when P' may
    vanish).  Sign-definite differences of the Bernstein coefficients certify
    that P' has no zero on the interval."""
    n = c.shape[0] - 1
    if n < 1:
        return 0.0, -1.0
    a = taylor(c, u)
    w = v - u
    bb = np.empty(n + 1)
    wk = 1.0
    binom = 1.0
    for k in range(n + 1):
        bb[k] = a[k] * wk / binom
        wk *= w
        binom = binom * (n - k) / (k + 1)
    beta = np.empty(n + 1)
    for i in range(n + 1):
        s = 0.0
        coef = 1.0
        for k in range(i + 1):
            s += coef * bb[k]
            coef = coef * (i - k) / (k + 1)
        beta[i] = s
    lo_b = beta.min()
    hi_b = beta.max()
    dmin = np.inf
    dmax = -np.inf
    for i in range(n):
        dd = beta[i + 1] - beta[i]
        if dd < dmin:
            dmin = dd
        if dd > dmax:
            dmax = dd
    if dmin > 0.0:
        lo = n * dmin / w
    elif dmax < 0.0:
        lo = -n * dmax / w
    else:
        lo = -1.0
    return hi_b - lo_b, lo


@njit(cache=True)
def _local_tol(tol, u, v):
    scale = max(u, v - u)
    return tol * (v - u) / scale


@njit(cache=True)
def _gauss_noise(ca, u, v, mode):
    """Rounding bound for a Gauss panel: phase error times int |w|."""
    dphi = min(_phase_err(ca, max(abs(u), abs(v))), 2.0)
    if mode == MODE_ONE or u <= 0.0:
        mass = v - u
    else:
        mass = np.log(v / u)
    return dphi * mass


@njit(cache=True)
def integrate_finite(c, dc, a, b, mode, tol):
    """Adaptive integral over [a, b]; returns (value, error estimate, ok, panels)."""
    total = 0.0 + 0.0j
    err = 0.0
    ok = True
    panels = 0
    if b <= a:
        return total, err, ok, panels
    ca = np.abs(c)
    su = np.empty(_MAX_DEPTH + 2)
    sv = np.empty(_MAX_DEPTH + 2)
    sd = np.empty(_MAX_DEPTH + 2, dtype=np.int64)
    top = 0
    su[0] = a
    sv[0] = b
    sd[0] = 0
    top = 1
    while top > 0:
        top -= 1
        u = su[top]
        v = sv[top]
        depth = sd[top]
        panels += 1
        if panels > _MAX_PANELS:
            ok = False
            break
        if u > 0.0 and v / u > 4.0:
            mid = np.sqrt(u * v)
        else:
            mid = 0.5 * (u + v)
        var, lo = _classify(c, u, v)
        accepted = False
        if var <= _PHASE_GAUSS or mid <= u or mid >= v:
            noise = _gauss_noise(ca, u, v, mode)
            lim = max(_local_tol(tol, u, v), 4.0 * noise)
            whole = _gauss(c, u, v, mode)
            halves = _gauss(c, u, mid, mode) + _gauss(c, mid, v, mode)
            e = abs(whole - halves)
            if e <= lim or mid <= u or mid >= v:
                total += halves
                err += e + noise
                accepted = True
        elif lo <= 0.0 and u > 0.0 and mode != MODE_REG and dc.shape[0] > 1:
            # stationary point inside: second-derivative van der Corput bound
            _, lo2 = _classify(dc, u, v)
            if lo2 > 0.0:
                wb = 1.0 if mode == MODE_ONE else 2.0 / u
                bound = 8.0 * wb / np.sqrt(lo2)
                # when the phase itself carries rounding error above a radian
                # the bound is the best available answer
                if bound <= max(_local_tol(tol, u, v), 0.01 * tol) or _phase_err(ca, v) >= 1.0:
                    err += bound
                    accepted = True
        if accepted:
            pass
        elif lo > 0.0 and u > 0.0 and var > _PHASE_GAUSS:
            # Levin collocation is ill-conditioned at low frequency
            whole, n0 = _levin(c, dc, ca, u, v, mode)
            h1, n1 = _levin(c, dc, ca, u, mid, mode)
            h2, n2 = _levin(c, dc, ca, mid, v, mode)
            halves = h1 + h2
            noise = n0 + n1 + n2
            lim = max(_local_tol(tol, u, v), 4.0 * noise)
            e = abs(whole - halves)
            if e <= lim:
                total += halves
                err += e + noise
                accepted = True
        if not accepted:
            if depth >= _MAX_DEPTH or top + 2 > _MAX_DEPTH + 2:
                ok = False
                continue
            # push right first so the left half is processed next
            su[top] = mid
            sv[top] = v
            sd[top] = depth + 1
            top += 1
            su[top] = u
            sv[top] = mid
            sd[top] = depth + 1
            top += 1
    return total, err, ok, panels


@njit(cache=True)
def _tail_ready(c, x, k_min):
    a = taylor(c, x)
    d = a.shape[0] - 1
    sgn = 1.0 if a[d] > 0 else -1.0
    for k in range(1, d + 1):
        if a[k] * sgn < 0.0:
            return False
    return abs(a[1]) * x >= k_min


@njit(cache=True)
def tail_start(c, x0, k_min=_TAIL_K):
    """Smallest point of the ladder x0, 1.25 x0, ... past which every Taylor
    coefficient of P has the sign of the leading one (so P' keeps its sign and
    |P'| grows) and r|P'(r)| >= k_min."""
    x = max(x0, 1e-300)
    for _ in range(8000):
        if _tail_ready(c, x, k_min):
            return x
        x *= 1.25
    return np.inf


@njit(cache=True)
def tail_series(c, y, nterms):
    """Asymptotic expansion of int_y^inf e^{iP(r)} dr/r by repeated
    integration by parts, with power series in t = r - y.

    Returns (value, size of the last term)."""
    L = nterms + 1
    a = taylor(c, y)
    d = a.shape[0] - 1
    # iP'(y + t)
    dp = np.zeros(L, dtype=np.complex128)
    for k in range(min(L, d)):
        dp[k] = 1j * (k + 1) * a[k + 1]
    # S = 1 / (iP')
    S = np.zeros(L, dtype=np.complex128)
    S[0] = 1.0 / dp[0]
    for k in range(1, L):
        acc = 0.0 + 0.0j
        for j in range(1, k + 1):
            acc += dp[j] * S[k - j]
        S[k] = -acc / dp[0]
    q = np.zeros(L, dtype=np.complex128)
    yk = 1.0 / y
    for k in range(L):
        q[k] = yk
        yk *= -1.0 / y
    total = 0.0 + 0.0j
    last = 0.0
    sign = 1.0
    m = L
    for k in range(nterms):
        h = np.zeros(m, dtype=np.complex128)
        for i in range(m):
            acc = 0.0 + 0.0j
            for j in range(i + 1):
                acc += q[j] * S[i - j]
            h[i] = acc
        total += sign * h[0]
        last = abs(h[0])
        sign = -sign
        # q <- h'
        m -= 1
        for i in range(m):
            q[i] = (i + 1) * h[i + 1]
    return -np.exp(1j * horner(c, y)) * total, last


@njit(cache=True)
def integrate_to_inf(c, dc, a, tol):
    """int_a^inf e^{iP(r)} dr / r for a > 0 and deg P >= 1."""
    d = c.shape[0] - 1
    y = tail_start(c, a, 30.0 * (d + 1))
    if not np.isfinite(y):
        return 0.0 + 0.0j, np.inf, False, 0, y
    tail = 0.0 + 0.0j
    terr = np.inf
    for _ in range(200):
        if not np.isfinite(horner(dc, y) * y):
            return 0.0 + 0.0j, np.inf, False, 0, y
        tail, terr = tail_series(c, y, _TAIL_TERMS)
        if terr <= 0.01 * tol:
            break
        y *= 1.25
    total = 0.0 + 0.0j
    err = 0.0
    ok = True
    panels = 0
    lo = a
    # geometric pieces keep the adaptive driver away from huge linear spans
    while lo < y:
        hi = min(8.0 * lo, y)
        val, e, good, np_ = integrate_finite(c, dc, lo, hi, MODE_INV, tol)
        total += val
        err += e
        ok = ok and good
        panels += np_
        lo = hi
    total += tail
    err += terr
    return total, err, ok and terr <= tol, panels, y


@njit(cache=True)
def radial_value(c, R, tol):
    """F = int_0^1 (e^{iP}-1) dr/r + int_1^R e^{iP} dr/r for P(0) = 0.

    Returns (value, error estimate, ok, panels)."""
    dc = np.empty(max(c.shape[0] - 1, 1))
    if c.shape[0] > 1:
        for k in range(1, c.shape[0]):
            dc[k - 1] = k * c[k]
    else:
        dc[0] = 0.0
    v0, e0, ok0, n0 = integrate_finite(c, dc, 0.0, 1.0, MODE_REG, tol)
    if np.isfinite(R):
        v1, e1, ok1, n1 = integrate_finite(c, dc, 1.0, R, MODE_INV, tol)
    else:
        v1, e1, ok1, n1, _ = integrate_to_inf(c, dc, 1.0, tol)
    return v0 + v1, e0 + e1, ok0 and ok1, n0 + n1


@njit(cache=True)
def radial_batch(C, R, tol):
    """radial_value for every row of C (trailing zero coefficients allowed)."""
    m = C.shape[0]
    out = np.empty(m, dtype=np.complex128)
    errs = np.empty(m)
    oks = np.empty(m, dtype=np.bool_)
    for i in range(m):
        row = C[i]
        d = row.shape[0] - 1
        big = 0.0
        for k in range(d + 1):
            big = max(big, abs(row[k]))
        # a top coefficient below rounding level of the others only moves the
        # far tail, where its stationary point contributes O(sqrt(|c_d|))
        while d > 0 and abs(row[d]) <= _TRIM * big:
            d -= 1
        c = row[: d + 1].copy()
        if d == 0:
            out[i] = np.log(R) if np.isfinite(R) else np.inf
            errs[i] = 0.0
            oks[i] = np.isfinite(R)
            continue
        v, e, ok, _ = radial_value(c, R, tol)
        out[i] = v
        errs[i] = e
        oks[i] = ok
    return out, errs, oks
