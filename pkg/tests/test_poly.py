import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osclog.errors import ConstantPolynomial, ZeroPolynomial
from osclog.poly import (MultiPoly, Poly, derivative, eval_poly, homogeneous_parts, isolate_roots,
                         radial_restriction, root_bound, sphere_sup_norm)

coeff_lists = st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=12)


@pytest.mark.parametrize("c, x, want", [([0, 1], 3, 3), ([1, 0, -2], 2, -7), ([0, 0, 0, 1], 1.5, 3.375)])
def test_eval(c, x, want):
    assert eval_poly(Poly(c), x) == pytest.approx(want)
    assert Poly(c)(x) == pytest.approx(want)


@pytest.mark.parametrize("c, want", [([5], [0]), ([0, 0, 1], [0, 2]), ([1, 1, 1, 1], [1, 2, 3])])
def test_derivative(c, want):
    np.testing.assert_allclose(derivative(Poly(c)).coeffs, want)


@given(coeff_lists, st.floats(-3, 3))
def test_derivative_matches_finite_difference(c, x):
    p = Poly(c)
    h = 1e-6
    fd = (p(x + h) - p(x - h)) / (2 * h)
    assert derivative(p)(x) == pytest.approx(fd, rel=1e-5, abs=1e-4 * (1 + sum(abs(v) for v in c)) * 30**len(c) * 1e-8)


def test_homogeneous_parts_examples():
    h = homogeneous_parts(MultiPoly({(1, 0): 1.0, (1, 1): 1.0}, 2))
    assert set(h.parts) == {1, 2}
    assert h.sup_norms[1] == pytest.approx(1.0)
    assert h.sup_norms[2] == pytest.approx(0.5)
    h = homogeneous_parts(MultiPoly({(2,): 3.0}, 1))
    assert h.sup_norms == {2: pytest.approx(3.0)}
    h = homogeneous_parts(MultiPoly({(2, 0): 1.0, (0, 2): 1.0}, 2))
    assert h.sup_norms[2] == pytest.approx(1.0)


def test_homogeneous_parts_constant_raises():
    with pytest.raises(ConstantPolynomial):
        homogeneous_parts(MultiPoly({(0, 0): 2.0}, 2))


def test_sphere_sup_norm_s2():
    # x y z attains 1/(3 sqrt 3) on S^2
    q = MultiPoly({(1, 1, 1): 1.0}, 3)
    assert sphere_sup_norm(q) == pytest.approx(1 / (3 * math.sqrt(3)), rel=1e-9)


def test_radial_restriction_examples():
    h = homogeneous_parts(MultiPoly({(1, 0): 1.0, (1, 1): 1.0}, 2))
    # trailing zero coefficients are trimmed: [0, 1, 0] is stored as [0, 1]
    np.testing.assert_allclose(radial_restriction(h, (1, 0)).coeffs, [0, 1])
    h2 = homogeneous_parts(MultiPoly({(2, 0): 1.0, (0, 2): 1.0}, 2))
    np.testing.assert_allclose(radial_restriction(h2, (0, 1)).coeffs, [0, 0, 1])
    h3 = homogeneous_parts(MultiPoly({(1, 0): 1.0}, 2))
    np.testing.assert_allclose(radial_restriction(h3, (-1, 0)).coeffs, [0, -1])


def test_isolate_roots_examples():
    e = isolate_roots(Poly([-1, 0, 1]), (0, math.inf))
    assert len(e) == 1 and e[0].lo <= 1 <= e[0].hi
    assert isolate_roots(Poly([1, 0, 1]), (-10, 10)) == []
    cubic = Poly(np.polynomial.polynomial.polyfromroots([1, 2, 3]))
    mids = [r.mid for r in isolate_roots(cubic, (1.5, math.inf))]
    np.testing.assert_allclose(mids, [2, 3], atol=1e-10)


def test_isolate_roots_zero_poly():
    with pytest.raises(ZeroPolynomial):
        isolate_roots(Poly([0.0]))


@settings(max_examples=60, deadline=None)
@given(coeff_lists)
def test_isolate_roots_accounts_for_sign_changes(c):
    p = Poly(c)
    if p.degree < 1:
        return
    encs = isolate_roots(p, (-20, 20))
    # every enclosure is disjoint and sorted
    for a, b in zip(encs, encs[1:]):
        assert a.hi < b.lo
    # a dense scan finds no sign change outside the enclosures
    x = np.linspace(-20, 20, 200_001)
    v = p(x)
    idx = np.flatnonzero(np.sign(v[1:]) * np.sign(v[:-1]) < 0)
    for i in idx:
        lo, hi = x[i], x[i + 1]
        assert any(e.lo <= hi and e.hi >= lo for e in encs)


@given(coeff_lists)
def test_root_bound_contains_roots(c):
    p = Poly(c)
    if p.degree < 1 or abs(p.coeffs[-1]) < 1e-6:
        return
    r = np.roots(p.coeffs[::-1])
    assert np.all(np.abs(r) <= root_bound(p) * (1 + 1e-9))


def test_multipoly_text_roundtrip():
    p = MultiPoly({(1, 0): 0.5, (0, 3): -2.0}, 2)
    assert MultiPoly.from_text(p.to_text()) == p
    with pytest.raises(ValueError):
        MultiPoly.from_text("1 2\n3 1 1")
