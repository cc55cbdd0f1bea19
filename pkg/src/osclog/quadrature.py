"""Nested tanh-sinh rules on arcs and the periodic trapezoid rule.

Both drivers take a batch integrand ``f(x) -> values`` and refine level by
level, reusing every earlier evaluation.  tanh-sinh tolerates integrable
endpoint singularities (logarithmic or algebraic), which is what the angular
integrands have at zeros of the top homogeneous part.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_TMAX = 3.6


def ts_level_nodes(level: int):
    """Abscissae t of tanh-sinh level ``level`` that are new at that level, with step h."""
    h = 0.5**level
    if level == 0:
        k = np.arange(-int(_TMAX / h), int(_TMAX / h) + 1)
    else:
        k = np.arange(-int(_TMAX / h), int(_TMAX / h) + 1)
        k = k[k % 2 != 0]
    return k * h, h


def ts_map(t: np.ndarray, a: float, b: float):
    """Points and weights on [a, b]; points near an endpoint are formed from
    their distance to it so no precision is lost there."""
    u = 0.5 * math.pi * np.sinh(t)
    half = 0.5 * (b - a)
    # distance to the nearer endpoint: (b - a) / (1 + e^{2|u|})
    dist = (b - a) / (1.0 + np.exp(2.0 * np.abs(u)))
    x = np.where(t < 0, a + dist, b - dist)
    x = np.where(t == 0, 0.5 * (a + b), x)
    w = half * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return x, w, dist


@dataclass
class QuadResult:
    value: complex
    error: float
    converged: bool
    evaluations: int
    levels: int
    sums: object = None


def tanh_sinh_arcs(f, arcs, tol: float, max_level: int = 9, min_level: int = 2,
                   correction=None) -> QuadResult:
    """Sum over arcs [a, b] of int f.

    ``f`` may return shape (N,) or (N, k); in the second case the weighted
    column sums are passed to ``correction``, which combines them into the
    scalar that is tested for convergence.
    """
    arcs = [(float(a), float(b)) for a, b in arcs if b > a]
    if not arcs:
        return QuadResult(0.0, 0.0, True, 0, 0, None)
    xs_all, ws_all, fs_all = [], [], []
    prev = None
    err = math.inf
    n_eval = 0
    for level in range(max_level + 1):
        t, h = ts_level_nodes(level)
        xs, ws = [], []
        for a, b in arcs:
            x, w, dist = ts_map(t, a, b)
            keep = (dist > 0) & (x > a) & (x < b)
            xs.append(x[keep])
            ws.append(w[keep])
        x = np.concatenate(xs)
        w = np.concatenate(ws)
        v = np.asarray(f(x))
        n_eval += x.size
        xs_all.append(x)
        ws_all.append(w)
        fs_all.append(v)
        X = np.concatenate(xs_all)
        # weights of earlier levels are rescaled by the current step
        W = np.concatenate([wl * h for wl in ws_all])
        V = np.concatenate(fs_all)
        sums = W @ V
        cur = correction(sums) if correction else sums
        if prev is not None:
            err = abs(cur - prev)
            if level >= min_level and err <= tol:
                return QuadResult(cur, err, True, n_eval, level, sums)
        prev = cur
    return QuadResult(prev, err, False, n_eval, max_level, sums)


def periodic_trapezoid(f, tol: float, m0: int = 16, max_points: int = 1 << 15,
                       offset: float = 0.0, correction=None) -> QuadResult:
    """int_0^{2 pi} f by the trapezoid rule, doubling the point count."""
    m = m0
    t = offset + 2 * np.pi * np.arange(m) / m
    V = np.asarray(f(t))
    X = t
    n_eval = m
    prev = None

    def total(X, V):
        sums = (2 * np.pi / X.size) * V.sum(axis=0)
        return correction(sums) if correction else sums

    cur = total(X, V)
    levels = 0
    while True:
        new = offset + 2 * np.pi * (np.arange(m) + 0.5) / m
        Vn = np.asarray(f(new))
        n_eval += m
        X = np.concatenate([X, new])
        V = np.concatenate([V, Vn])
        m *= 2
        levels += 1
        prev, cur = cur, total(X, V)
        err = abs(cur - prev)
        if err <= tol:
            return QuadResult(cur, err, True, n_eval, levels, (2 * np.pi / X.size) * V.sum(axis=0))
        if m >= max_points:
            return QuadResult(cur, err, False, n_eval, levels, (2 * np.pi / X.size) * V.sum(axis=0))


_GK = 10
_GX, _GW = np.polynomial.legendre.leggauss(_GK)


def _gauss_points(a: np.ndarray, b: np.ndarray):
    m, h = 0.5 * (a + b), 0.5 * (b - a)
    return (m[:, None] + h[:, None] * _GX[None, :]).ravel(), (h[:, None] * _GW[None, :]).ravel()


def _graded_edges(a: float, b: float, levels: int) -> list[float]:
    L = b - a
    inner = [a + L * 2.0**-j for j in range(levels, 0, -1)] + [b - L * 2.0**-j for j in range(2, levels + 1)]
    return sorted({a, b, *inner})


def adaptive_gauss(f, arcs, tol: float, max_evals: int = 40000, grade: int = 8,
                   correction=None, error_of=None) -> QuadResult:
    """Globally adaptive Gauss quadrature over a union of arcs.

    Every panel keeps its 10-point Gauss value and those of its two halves;
    the difference is its error estimate.  Each round splits the panels that
    together carry half of the total estimated error.  Arcs start out graded
    geometrically toward both ends, where the angular integrands have their
    (integrable) singularities.

    ``f`` returns shape (N,) or (N, k); ``correction`` combines the column
    sums into a scalar and ``error_of(diff, sums)`` maps the difference between
    the one-panel and two-half column sums to a nonnegative panel error.
    """
    edges = []
    for a, b in arcs:
        if b > a:
            e = _graded_edges(float(a), float(b), grade)
            edges.extend(zip(e[:-1], e[1:]))
    if not edges:
        return QuadResult(0.0, 0.0, True, 0, 0, None)
    err_fn = error_of or (lambda d, s: float(np.max(np.abs(d))))

    def halves_of(A, B):
        M = 0.5 * (A + B)
        aa = np.concatenate([A, M])
        bb = np.concatenate([M, B])
        x, w = _gauss_points(aa, bb)
        v = np.asarray(f(x))
        k = A.size
        if v.ndim == 1:
            v = v[:, None]
        s = (w[:, None] * v).reshape(2 * k, _GK, -1).sum(axis=1)
        return s[:k], s[k:], x.size

    A = np.array([e[0] for e in edges])
    B = np.array([e[1] for e in edges])
    x, w = _gauss_points(A, B)
    v = np.asarray(f(x))
    if v.ndim == 1:
        v = v[:, None]
    whole = (w[:, None] * v).reshape(A.size, _GK, -1).sum(axis=1)
    left, right, ne = halves_of(A, B)
    evals = x.size + ne
    rounds = 0
    frozen_val = np.zeros(whole.shape[1])
    frozen_err = 0.0
    while True:
        halves = left + right
        errs = np.array([err_fn(d, s) for d, s in zip(halves - whole, halves)])
        total = frozen_val + halves.sum(axis=0)
        total_err = frozen_err + float(errs.sum())
        scalar = correction(total) if correction else (total[0] if total.size == 1 else total)
        if total_err <= tol:
            return QuadResult(scalar, total_err, True, evals, rounds, total)
        if evals >= max_evals:
            return QuadResult(scalar, total_err, False, evals, rounds, total)
        order = np.argsort(errs)[::-1]
        cum = np.cumsum(errs[order])
        nsplit = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
        pick = order[:nsplit]
        # panels too narrow to split are frozen with their current error
        narrow = (B[pick] - A[pick]) <= 1e-13 * np.maximum(1.0, np.abs(A[pick]))
        if narrow.any():
            fz = pick[narrow]
            frozen_val += halves[fz].sum(axis=0)
            frozen_err += float(errs[fz].sum())
            keep = np.ones(A.size, dtype=bool)
            keep[fz] = False
            remap = -np.ones(A.size, dtype=int)
            remap[keep] = np.arange(keep.sum())
            pick = remap[pick[~narrow]]
            A, B, whole, left, right = A[keep], B[keep], whole[keep], left[keep], right[keep]
            if pick.size == 0:
                continue
        Mid = 0.5 * (A[pick] + B[pick])
        nA = np.concatenate([A[pick], Mid])
        nB = np.concatenate([Mid, B[pick]])
        nwhole = np.concatenate([left[pick], right[pick]])
        nl, nr, ne = halves_of(nA, nB)
        evals += ne
        rounds += 1
        rest = np.ones(A.size, dtype=bool)
        rest[pick] = False
        A = np.concatenate([A[rest], nA])
        B = np.concatenate([B[rest], nB])
        whole = np.concatenate([whole[rest], nwhole])
        left = np.concatenate([left[rest], nl])
        right = np.concatenate([right[rest], nr])
