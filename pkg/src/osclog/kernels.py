"""Angular kernels Omega on S^{n-1}.

Registry ids:
    sign                  n=1, Omega(+-1) = +-1
    cos:m, sin:m          n=2, cos(m theta), sin(m theta)
    logsing:T             n=2, sign(cos theta) * min(log(1/|cos theta|), T)
    harmonic:l,m          n=3, real spherical harmonic Y_lm
    table:<path>          n=2 samples (theta, value), periodic linear interpolation

Every kernel is made mean-zero at construction.  Norms are computed on a fine
rule: L1 = int |Omega| and LlogL = int |Omega| (1 + log+ |Omega|).
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import lpmv

from .sphere import SPHERE_AREA


@dataclass(frozen=True, eq=False)
class KernelSpec:
    dim: int
    form: str
    func: Callable = field(repr=False)
    parity: str = "none"
    l1: float = 0.0
    llogl: float = 0.0
    mean_removed: float = 0.0
    singular: tuple = ()  # n=2: angles where Omega may be unbounded or kinked
    order: int = 0  # angular frequency hint for grid sizing

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.func(X) - self.mean_removed / SPHERE_AREA[self.dim]

    def is_odd(self, tol: float = 1e-10) -> bool:
        X = _probe_points(self.dim)
        a, b = self(X), self(-X)
        return bool(np.max(np.abs(a + b)) <= tol * max(1.0, np.max(np.abs(a))))

    def singular_polar(self, phi: float) -> list[float]:
        return []

    def to_dict(self) -> dict:
        return {"form": self.form, "dim": self.dim, "parity": self.parity,
                "l1": self.l1, "llogl": self.llogl}


def _probe_points(n: int) -> np.ndarray:
    rng = np.random.default_rng(12345)
    X = rng.standard_normal((512, n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _fine_rule(n: int, singular=()):
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        if singular:
            # graded (tanh-sinh) arcs between singular angles
            from .quadrature import ts_level_nodes, ts_map

            pts = sorted({s % (2 * math.pi) for s in singular})
            edges = pts + [pts[0] + 2 * math.pi]
            th, w = [], []
            for lev in range(8):
                t, h = ts_level_nodes(lev)
                for a, b in zip(edges, edges[1:]):
                    x, ww, dist = ts_map(t, a, b)
                    keep = dist > 1e-300
                    th.append(x[keep])
                    w.append(ww[keep] * 0.5**7)
            th = np.concatenate(th)
            return np.column_stack([np.cos(th), np.sin(th)]), np.concatenate(w)
        m = 1 << 16
        th = 2 * np.pi * (np.arange(m) + 0.5) / m
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(m, 2 * np.pi / m)
    z, wz = np.polynomial.legendre.leggauss(256)
    m = 512
    ph = 2 * np.pi * (np.arange(m) + 0.5) / m
    s = np.sqrt(1 - z**2)
    X = np.stack([np.outer(s, np.cos(ph)), np.outer(s, np.sin(ph)), np.outer(z, np.ones(m))], -1).reshape(-1, 3)
    return X, np.outer(wz, np.full(m, 2 * np.pi / m)).ravel()


def _parity(f, n):
    X = _probe_points(n)
    a, b = f(X), f(-X)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a + b)) <= 1e-10 * scale:
        return "odd"
    if np.max(np.abs(a - b)) <= 1e-10 * scale:
        return "even"
    return "none"


def make_kernel(dim: int, form: str, func: Callable, singular=(), order: int = 0) -> KernelSpec:
    """Wrap a raw angular function: subtract its mean, compute norms and parity."""
    X, w = _fine_rule(dim, singular)
    raw = func(X)
    mean = float(np.dot(w, raw))
    centred = raw - mean / SPHERE_AREA[dim]
    a = np.abs(centred)
    l1 = float(np.dot(w, a))
    if l1 <= 1e-14:
        raise ValueError(f"kernel {form!r} vanishes after mean subtraction")
    llogl = float(np.dot(w, a * (1.0 + np.log(np.maximum(a, 1.0)))))
    shifted = lambda Y, f=func, c=mean / SPHERE_AREA[dim]: f(Y) - c
    parity = _parity(shifted, dim)
    return KernelSpec(dim, form, func, parity, l1, llogl, mean, tuple(singular), order)


def _theta(X):
    return np.arctan2(X[:, 1], X[:, 0])


def real_harmonic(l: int, m: int):
    """Orthonormal real spherical harmonic Y_lm on S^2."""
    am = abs(m)
    if am > l:
        raise ValueError("need |m| <= l")
    norm = math.sqrt((2 * l + 1) / (4 * math.pi) * math.factorial(l - am) / math.factorial(l + am))

    def f(X):
        z = np.clip(X[:, 2], -1.0, 1.0)
        ph = np.arctan2(X[:, 1], X[:, 0])
        leg = lpmv(am, l, z)
        if m > 0:
            return math.sqrt(2) * norm * leg * np.cos(am * ph)
        if m < 0:
            return math.sqrt(2) * norm * leg * np.sin(am * ph)
        return norm * leg

    return f


def load_table(path: str | Path) -> tuple[np.ndarray, np.ndarray, tuple]:
    """Read (theta, value) samples from CSV or JSON.

    JSON: {"theta": [...], "values": [...], "singular": [...]} (singular optional).
    CSV: header ``theta,value``; rows in any order.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        data = json.loads(text)
        th, vals, sing = data["theta"], data["values"], data.get("singular", [])
    else:
        rows = list(csv.DictReader(text.splitlines()))
        th = [float(r["theta"]) for r in rows]
        vals = [float(r["value"]) for r in rows]
        sing = []
    th = np.mod(np.asarray(th, dtype=float), 2 * np.pi)
    order = np.argsort(th)
    return th[order], np.asarray(vals, dtype=float)[order], tuple(float(s) for s in sing)


def kernel(spec: str, dim: int | None = None) -> KernelSpec:
    """Build a registry kernel from its id string."""
    name, _, arg = spec.partition(":")
    if name == "sign":
        _need(dim, 1, spec)
        return make_kernel(1, spec, lambda X: np.sign(X[:, 0]))
    if name in ("cos", "sin"):
        _need(dim, 2, spec)
        m = int(arg or 1)
        trig = np.cos if name == "cos" else np.sin
        return make_kernel(2, spec, lambda X: trig(m * _theta(X)), order=m)
    if name == "logsing":
        _need(dim, 2, spec)
        T = float(arg or 20.0)

        def f(X):
            c = np.abs(X[:, 0])
            with np.errstate(divide="ignore"):
                v = np.minimum(-np.log(np.maximum(c, 1e-300)), T)
            return np.sign(X[:, 0]) * v

        return make_kernel(2, spec, f, singular=(0.5 * math.pi, 1.5 * math.pi))
    if name == "harmonic":
        _need(dim, 3, spec)
        l, m = (int(s) for s in arg.split(","))
        return make_kernel(3, spec, real_harmonic(l, m), order=l)
    if name == "table":
        _need(dim, 2, spec)
        th, vals, sing = load_table(arg)
        xp = np.concatenate([th - 2 * np.pi, th, th + 2 * np.pi])
        fp = np.concatenate([vals, vals, vals])
        f = lambda X: np.interp(np.mod(_theta(X), 2 * np.pi), xp, fp)
        return make_kernel(2, spec, f, singular=sing + tuple(th.tolist()) if len(th) <= 64 else sing)
    raise ValueError(f"unknown kernel id {spec!r}")


def _need(dim, want, spec):
    if dim is not None and dim != want:
        raise ValueError(f"kernel {spec!r} lives on S^{want - 1}, not S^{dim - 1}")
