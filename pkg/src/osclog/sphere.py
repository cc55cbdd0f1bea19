"""Quadrature rules on S^0, S^1 and S^2."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPHERE_AREA = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Nodes (unit vectors) and positive weights summing to |S^{n-1}|.

    ``order`` is the largest total degree of polynomials integrated exactly.
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    dim: int

    def __post_init__(self):
        for name in ("nodes", "weights"):
            a = np.array(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.weights.size

    def integrate(self, values) -> complex | float:
        """Ordered weighted sum; fixed order keeps results reproducible."""
        v = np.asarray(values)
        return np.dot(self.weights, v) if v.dtype.kind != "c" else complex(np.dot(self.weights, v))


def circle_angles(m: int, offset: float = 0.0) -> np.ndarray:
    return offset + 2 * np.pi * np.arange(m) / m


def sphere_grid(n: int, order: int) -> SphereGrid:
    """Rule exact for polynomials of total degree <= order.

    n=2: periodic trapezoid with order+1 points.
    n=3: Gauss-Legendre in z times trapezoid in azimuth.
    """
    if n == 1:
        return SphereGrid(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]), 10**9, 1)
    if n == 2:
        m = order + 1
        t = circle_angles(m)
        return SphereGrid(np.column_stack([np.cos(t), np.sin(t)]), np.full(m, 2 * np.pi / m), m - 1, 2)
    if n == 3:
        k = order // 2 + 1
        z, wz = np.polynomial.legendre.leggauss(k)
        m = order + 1
        ph = circle_angles(m)
        s = np.sqrt(1 - z**2)
        nodes = np.stack(
            [np.outer(s, np.cos(ph)), np.outer(s, np.sin(ph)), np.outer(z, np.ones(m))], axis=-1
        ).reshape(-1, 3)
        w = np.outer(wz, np.full(m, 2 * np.pi / m)).ravel()
        return SphereGrid(nodes, w, min(2 * k - 1, m - 1), 3)
    raise ValueError(f"dimension must be 1, 2 or 3, got {n}")


def spherical_angles(x: np.ndarray):
    """(polar, azimuth) for points of S^2."""
    x = np.asarray(x, dtype=float)
    th = np.arccos(np.clip(x[..., 2], -1.0, 1.0))
    ph = np.arctan2(x[..., 1], x[..., 0])
    return th, ph
