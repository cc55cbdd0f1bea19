import math

import numpy as np
import pytest

from osclog.kernels import kernel
from osclog.quadrature import adaptive_gauss, periodic_trapezoid, tanh_sinh_arcs
from osclog.sphere import SPHERE_AREA, sphere_grid


def test_kernel_norms_and_parity():
    k = kernel("cos:1")
    assert k.l1 == pytest.approx(4.0, rel=1e-8)
    assert k.parity == "odd" and k.is_odd()
    assert kernel("cos:2").parity == "even"
    assert kernel("sign").l1 == pytest.approx(2.0)


def test_kernel_mean_removed(tmp_path):
    # a table kernel with a nonzero mean is centred at construction
    f = tmp_path / "k.csv"
    th = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    f.write_text("theta,value\n" + "".join(f"{float(a)!r},{1.5 + math.sin(a)!r}\n" for a in th))
    k = kernel(f"table:{f}")
    t = 2 * np.pi * (np.arange(1 << 14) + 0.5) / (1 << 14)
    vals = k(np.column_stack([np.cos(t), np.sin(t)]))
    assert abs(vals.mean()) < 1e-6
    assert kernel("logsing:5").parity == "odd"


def test_harmonic_is_normalized():
    k = kernel("harmonic:1,0")
    g = sphere_grid(3, 40)
    assert g.integrate(k(g.nodes) ** 2) == pytest.approx(1.0, rel=1e-8)


def test_kernel_dimension_checked():
    with pytest.raises(ValueError):
        kernel("cos:1", 3)
    with pytest.raises(ValueError):
        kernel("nope")


def test_table_kernel(tmp_path):
    f = tmp_path / "k.csv"
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    f.write_text("theta,value\n" + "".join(f"{float(a)!r},{math.cos(a)!r}\n" for a in th))
    k = kernel(f"table:{f}")
    assert k.l1 == pytest.approx(4.0, rel=1e-2)


@pytest.mark.parametrize("n", [2, 3])
def test_sphere_grid_exactness(n):
    g = sphere_grid(n, 12)
    assert g.weights.sum() == pytest.approx(SPHERE_AREA[n])
    # int x_1^2 = |S^{n-1}| / n
    assert g.integrate(g.nodes[:, 0] ** 2) == pytest.approx(SPHERE_AREA[n] / n)


def test_tanh_sinh_endpoint_singularity():
    r = tanh_sinh_arcs(lambda x: x**-0.5, [(0.0, 1.0)], 1e-10)
    assert r.value == pytest.approx(2.0, rel=1e-9)


def test_periodic_trapezoid():
    r = periodic_trapezoid(lambda t: np.exp(np.cos(t)), 1e-12)
    from scipy.special import i0
    assert r.value == pytest.approx(2 * math.pi * i0(1.0), rel=1e-12)


def test_adaptive_gauss_kink():
    r = adaptive_gauss(lambda x: np.abs(x - 0.3), [(0.0, 1.0)], 1e-10)
    assert r.value == pytest.approx(0.5 * (0.3**2 + 0.7**2), abs=1e-9)
