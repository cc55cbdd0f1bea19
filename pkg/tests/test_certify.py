import json
import math

import numpy as np
import pytest

from osclog.certify import (c1_base, certificate, i1_term, i2_split, normalize_dilation,
                            young_decompose)
from osclog.errors import DegenerateTopHalf, ZeroLinearForm
from osclog.kernels import kernel
from osclog.poly import MultiPoly, homogeneous_parts, sphere_sup_norm


def test_normalize_single_part():
    h = homogeneous_parts(MultiPoly({(3, 0): 8.0}, 2))
    g, lam = normalize_dilation(h)
    assert lam == pytest.approx(0.5)
    assert g.sup_norms[3] == pytest.approx(1.0)


def test_normalize_idempotent():
    h = homogeneous_parts(MultiPoly({(2, 0): 1.0, (0, 2): 1.0, (1, 0): 3.0}, 2))
    g, lam = normalize_dilation(h)
    _, lam2 = normalize_dilation(g)
    assert lam == pytest.approx(1.0) and lam2 == pytest.approx(1.0)


def test_normalize_random_recomputed():
    rng = np.random.default_rng(443)
    terms = {(a, j - a): rng.uniform(-1, 1) for j in range(1, 9) for a in range(j + 1)}
    g, _ = normalize_dilation(homogeneous_parts(MultiPoly(terms, 2)))
    m = max(sphere_sup_norm(g.parts[j]) for j in range(5, 9))
    assert m == pytest.approx(1.0, abs=1e-10)


def test_normalize_degenerate():
    h = homogeneous_parts(MultiPoly({(1, 0): 1.0}, 2), degree=4)
    with pytest.raises(DegenerateTopHalf):
        normalize_dilation(h)


def test_i1_term():
    om = kernel("cos:1")
    g, _ = normalize_dilation(homogeneous_parts(MultiPoly({(4, 0): 2.0}, 2)))
    assert i1_term(g, om) == pytest.approx(om.l1 / 4)
    parts = {(3, 0): 1.0, (4, 0): 1.0}
    g2 = homogeneous_parts(MultiPoly(parts, 2))
    assert i1_term(g2, om) == pytest.approx(om.l1 * (1 / 3 + 1 / 4))


def test_i2_split_finite():
    g, _ = normalize_dilation(homogeneous_parts(MultiPoly({(2, 0): 1.0, (0, 2): 1.0, (1, 0): 0.3}, 2)))
    vdc, sub = i2_split(g, kernel("cos:1"))
    assert math.isfinite(vdc) and math.isfinite(sub) and sub >= 0


def test_young_radial_form():
    om = kernel("cos:1")
    g, _ = normalize_dilation(homogeneous_parts(MultiPoly({(2, 0): 1.0, (0, 2): 1.0}, 2)))
    pw, ll, ok = young_decompose(g, om)
    assert pw == pytest.approx(2 * math.pi) and ll == pytest.approx(om.llogl) and ok


def test_young_linear_matches_bounds():
    from osclog.bounds import polweight_integral
    h = homogeneous_parts(MultiPoly({(1, 0): 1.0}, 2))
    pw, _, _ = young_decompose(h, kernel("cos:1"))
    assert pw == polweight_integral(MultiPoly({(1, 0): 1.0}, 2))


def test_c1_base_n1():
    om = kernel("sign")
    assert c1_base(MultiPoly({(1,): 2.0}, 1), om) == pytest.approx(om.l1)


def test_c1_base_against_graded_oracle():
    # Omega = sin theta is small near the zero of P = x: the log term is (1/2) int log(1/|cos|) |sin|
    from scipy.integrate import quad
    om = kernel("sin:1")
    f = lambda t: 0.5 * math.log(1 / abs(math.cos(t))) * abs(math.sin(t))
    pts = [0, math.pi / 2, 3 * math.pi / 2, 2 * math.pi]
    want = om.l1 + sum(quad(f, a, b, limit=200)[0] for a, b in zip(pts, pts[1:]))
    assert c1_base(MultiPoly({(1, 0): 1.0}, 2), om) == pytest.approx(want, rel=1e-8)


def test_c1_base_zero_form():
    with pytest.raises(ZeroLinearForm):
        c1_base(MultiPoly({(0, 0): 1.0}, 2), kernel("cos:1"))


def test_certificate_ladder_and_json():
    p = MultiPoly({(1,): 1.0, (3,): 1.0, (7,): 1.0}, 1)
    cert = certificate(p, kernel("sign"))
    assert cert.degree_ladder == [8, 4, 2, 1]
    assert cert.levels[2].skipped  # no part of degree 2 at the d = 2 level
    d = json.loads(cert.to_json())
    assert d["total_bracket"] == pytest.approx(cert.total_bracket)
    assert cert.measured <= cert.total_bracket
    assert "total bracket" in cert.table()


def test_certificate_dilation_invariant():
    p = MultiPoly({(1, 0): 0.5, (2, 0): 1.0, (1, 1): -0.7, (0, 3): 0.4}, 2)
    om = kernel("cos:1")
    a = certificate(p, om, measure=False).total_bracket
    b = certificate(p.dilate(3.0), om, measure=False).total_bracket
    assert b == pytest.approx(a, rel=1e-8)


def test_certificate_linear_base_only():
    cert = certificate(MultiPoly({(1,): 1.0}, 1), kernel("sign"))
    assert cert.degree_ladder == [1]
    assert cert.total_bracket == pytest.approx(2.0)
    assert cert.measured == pytest.approx(math.pi, abs=1e-6)
