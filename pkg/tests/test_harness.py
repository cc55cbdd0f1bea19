import math

import numpy as np
import pytest

from osclog.harness import (EvalSettings, GROWTH_COLUMNS, evaluate, fit_log, growth_csv, growth_study,
                            monomials, normalize_top_half, random_poly_nd, search_extremal,
                            sign_approximant)
from osclog.kernels import kernel
from osclog.oscquad import In, pv_1d
from osclog.poly import MultiPoly, Poly, homogeneous_parts


def test_monomial_counts():
    assert len(monomials(1, 5)) == 5
    assert len(monomials(2, 3)) == 2 + 3 + 4
    assert len(monomials(3, 2)) == 3 + 6


def test_sign_approximant():
    c = sign_approximant(2)
    assert np.polynomial.polynomial.polyval(1.0, c) == pytest.approx(1.0)
    assert np.polynomial.polynomial.polyval(-1.0, c) == pytest.approx(-1.0)
    assert c.size == 6 and c[0] == 0


def test_normalize_top_half():
    p = normalize_top_half(random_poly_nd(np.random.default_rng(1), 2, 6))
    h = homogeneous_parts(p)
    assert max(h.sup_norms.get(j, 0) for j in (4, 5, 6)) == pytest.approx(1.0, rel=1e-8)


def test_ridge_identity():
    # I_2(g(x_1), cos theta) = 2 pv_1d(g)
    g = [0.3, -0.5, 1.0]
    p = MultiPoly({(k + 1, 0): c for k, c in enumerate(g)}, 2)
    lhs = In(p, kernel("cos:1")).value
    rhs = 2 * pv_1d(Poly([0.0] + g)).value
    assert abs(lhs - rhs) < 1e-6


def test_search_d1_is_pi():
    _, v = search_extremal(1, 1, "sign", budget=20, seed=0)
    assert v == pytest.approx(math.pi, abs=1e-4)


def test_search_feasibility_and_nesting():
    _, v3 = search_extremal(3, 1, "sign", budget=60, seed=0)
    _, v9 = search_extremal(9, 1, "sign", budget=60, seed=0)
    assert v3 >= math.pi - 1e-4
    # P = x stays feasible at every degree
    assert v9 >= math.pi - 1e-4


def test_growth_single_degree_definition():
    om = kernel("sign")
    rows, _ = growth_study([1], 1, om, samples=5, seed=0)
    r = rows[0]
    assert r.empirical_c == pytest.approx(r.sup_abs_integral / (math.log(2) * (om.llogl + 1)))


def test_growth_nondecreasing_and_csv():
    rows, fit = growth_study([2, 4, 8, 16], 1, "sign", samples=10, seed=2, budget=20)
    sups = [r.sup_abs_integral for r in rows]
    assert sups == sorted(sups)
    text = growth_csv(rows)
    assert text.splitlines()[0] == ",".join(GROWTH_COLUMNS)
    assert text == growth_csv(growth_study([2, 4, 8, 16], 1, "sign", samples=10, seed=2, budget=20)[0])


def test_growth_requires_sorted_degrees():
    with pytest.raises(ValueError):
        growth_study([4, 2], 1, "sign", samples=1, seed=0)


def test_fit_log_exact_line():
    ds = [2, 4, 8, 16]
    f = fit_log(ds, [1 + 2 * math.log(d) for d in ds])
    assert f.slope == pytest.approx(2) and f.intercept == pytest.approx(1) and f.r2 == pytest.approx(1)


def test_evaluate_fixed_rule_close_to_adaptive():
    p = MultiPoly({(1, 0): 1.0, (0, 2): 0.5}, 2)
    om = kernel("cos:1")
    screen = evaluate(p, om, EvalSettings(points=512))
    assert screen == pytest.approx(abs(In(p, om).value), rel=1e-2)
