"""Acceptance criteria 1-12.  Each test prints one [PASS]/[FAIL] line.

Criteria that the mathematics does not support are marked strict xfail: the
check still runs at the stated tolerance and prints FAIL.
"""
from __future__ import annotations

import itertools
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from oracles import log_measure_scan, polweight_oracle_2d
from osclog.bounds import (_binary_beta, check_derivative_floor, eq32_harness, node_product,
                           node_system, polweight_integral, random_homogeneous, vdc_check)
from osclog.certify import certificate
from osclog.errors import HypothesisViolated
from osclog.harness import growth_study, random_poly_nd
from osclog.kernels import kernel
from osclog.oscquad import In, pv_1d, remark_odd
from osclog.poly import MultiPoly, Poly
from osclog.sublevel import (cw_suite, lemma_suite, log_lemma_bracket, log_measure, sublevel_set,
                             top_half_max)


def _r2(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    return 1.0 - float(res @ res) / float(((y - y.mean()) ** 2).sum())


# 1 --------------------------------------------------------------------------


def test_c01_odd_monomials(report):
    t0 = time.time()
    errs = [abs(abs(pv_1d(Poly.monomial(k)).value) - math.pi / k) for k in (1, 3, 5, 7, 9)]
    even = [abs(pv_1d(Poly.monomial(k)).value) for k in (2, 4, 6, 8)]
    dt = time.time() - t0
    ok = max(errs) <= 1e-5 and max(even) <= 1e-8 and dt <= 30
    report("C1 odd-monomial law", ok, f"max odd err {max(errs):.2e}, max even {max(even):.2e}, {dt:.1f}s")
    assert ok


# 2, 3 ----------------------------------------------------------------------


def _lemma_rows(n):
    rows = []
    for p, alpha in lemma_suite(n, seed=0):
        mu = log_measure(sublevel_set(p, alpha))
        br = log_lemma_bracket(alpha, top_half_max(p), p.degree)
        rows.append((p, alpha, mu, br))
    return rows


def test_c02_sublevel_exactness(report):
    t0 = time.time()
    worst, fails = 0.0, 0
    for p, alpha, mu, _ in _lemma_rows(1000):
        err = abs(mu - log_measure_scan(p.coeffs, alpha))
        worst = max(worst, err)
        fails += err > 1e-4
    dt = time.time() - t0
    ok = fails == 0 and dt <= 300
    report("C2 sublevel exactness", ok, f"1000 cases, {fails} failures, worst {worst:.2e}, {dt:.0f}s")
    assert ok


def test_c03_log_lemma_ratio(report):
    small = _lemma_rows(1000)
    big = small + [r for r in _lemma_rows(4000)[1000:]]
    r1 = max(mu / br.value for *_, mu, br in small)
    r4 = max(mu / br.value for *_, mu, br in big)
    branches = {b: sum(r[3].branch == b for r in small) for b in ("power", "log")}
    change = abs(r4 - r1) / r1
    ok = math.isfinite(r4) and change < 0.10 and min(branches.values()) >= 100
    report("C3 log-measure lemma", ok,
           f"max ratio {r1:.4f} (N=1000) vs {r4:.4f} (N=4000), change {change:.1%}, branches {branches}")
    assert ok


# 4, 5 ----------------------------------------------------------------------


def test_c04_eq32_dominance(report):
    t0 = time.time()
    rows = eq32_harness(10_000, seed=0, max_degree=8, exact=True)
    bad = sum(not r["ok"] for r in rows)
    dt = time.time() - t0
    ok = bad == 0 and dt <= 120
    report("C4 geometric-node coefficient bound", ok, f"10000 cases, {len(rows)} coefficients, {bad} violations, {dt:.0f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="for even d the unique j can equal d/2 > (d-1)/2")
def test_c05_node_uniqueness(report):
    rng = np.random.default_rng(5)
    not_unique, above, argmin_bad = 0, 0, 0
    example = None
    for _ in range(10_000):
        t = 1 + 1e-6 + rng.uniform(0, 9 - 1e-6)
        d = int(rng.integers(1, 65))
        ns = node_system(t, d)
        not_unique += ns.candidates != 1
        if 2 * ns.j_star > d - 1:
            above += 1
            example = example or (t, d, ns.j_star)
        if d <= 16:
            tf = Fraction(t)
            prods = [node_product(tf, d, j) for j in range(d + 1)]
            argmin_bad += prods.index(min(prods)) != ns.j_star
    ok = not_unique == 0 and above == 0
    report("C5 node uniqueness and j <= (d-1)/2", ok,
           f"non-unique {not_unique}, j > (d-1)/2 in {above} cases (e.g. t={example[0]:.4f}, d={example[1]}, "
           f"j={example[2]}), argmin mismatches {argmin_bad}" if example else
           f"non-unique {not_unique}, j bound violations 0, argmin mismatches {argmin_bad}")
    assert ok


# 6 --------------------------------------------------------------------------


def _vdc_cases(count=20):
    rng = np.random.default_rng(6)
    cases = []
    while len(cases) < count:
        deg = int(rng.integers(2, 6))
        c = rng.uniform(-1, 1, deg + 1)
        c[1] = rng.choice([-1, 1]) * rng.uniform(1.5, 3.0)
        a = float(rng.uniform(0.0, 2.0))
        b = a + float(rng.uniform(0.5, 2.0))
        phase = Poly(c)
        try:
            check_derivative_floor(phase, a, b)
        except HypothesisViolated:
            continue
        cases.append((phase, a, b))
    return cases


def test_c06_vdc_decay(report):
    coarse = 10.0 ** np.linspace(1, 5, 21)
    fine = 10.0 ** np.linspace(1, 5, 41)
    worst, sups = 0.0, []
    for phase, a, b in _vdc_cases():
        s1 = max(vdc_check(phase, lam, a, b).ratio for lam in coarse)
        s2 = max(vdc_check(phase, lam, a, b).ratio for lam in fine)
        sups.append(s2)
        worst = max(worst, abs(s2 - s1) / s1)
    ok = all(math.isfinite(s) for s in sups) and worst <= 0.10
    report("C6 van der Corput decay", ok,
           f"20 cases, sup ratio range [{min(sups):.3f}, {max(sups):.3f}], worst grid change {worst:.1%}")
    assert ok


# 7 --------------------------------------------------------------------------


@pytest.mark.xfail(strict=True, reason="the fitted constant is a sample maximum that keeps growing with the suite")
def test_c07_carbery_wright(report):
    rows = cw_suite(3200, seed=0)
    ratios = np.array([r["ratio"] for r in rows])
    c_half, c_full = ratios[:1600].max(), ratios.max()
    exceptions = int(np.sum(ratios > c_full))
    change = abs(c_full - c_half) / c_half
    ok = exceptions == 0 and change <= 0.10
    report("C7 Carbery-Wright", ok,
           f"c_hat {c_half:.4f} (N=1600) vs {c_full:.4f} (N=3200), change {change:.1%}, exceptions {exceptions}")
    assert ok


# 8 --------------------------------------------------------------------------


def test_c08_polweight(report):
    vals, worst = [], 0.0
    for i in range(400):
        rng = np.random.default_rng([8, i])
        p = random_homogeneous(rng, 2, int(rng.integers(1, 9)))
        v = polweight_integral(p)
        vals.append(v)
        if i < 200:
            o = polweight_oracle_2d(_binary_beta(p))
            worst = max(worst, abs(v - o) / o)
    m1, m2 = max(vals[:200]), max(vals)
    change = abs(m2 - m1) / m1
    ok = worst <= 1e-3 and change <= 0.10
    report("C8 polweight integral", ok,
           f"200 oracle cases, worst rel err {worst:.2e}; suite max {m1:.4f} (200) vs {m2:.4f} (400), change {change:.1%}")
    assert ok


# 9 --------------------------------------------------------------------------


def _remark_case(i):
    """|x|^{2k} scaled, plus random lower-degree terms, with an odd kernel."""
    rng = np.random.default_rng([9, i])
    n = 2 if i < 12 else 3
    forms = ["cos:1", "cos:3", "sin:1"] if n == 2 else ["harmonic:1,0", "harmonic:3,1"]
    form = forms[i % len(forms)]
    k = int(rng.integers(1, 3)) if n == 2 else 1
    c = rng.choice([-1, 1]) * rng.uniform(0.5, 2)
    terms = {}
    for e in itertools.product(range(2 * k + 1), repeat=n):
        if 1 <= sum(e) < 2 * k:
            terms[e] = rng.uniform(-1, 1)
    for e in itertools.product(range(k + 1), repeat=n):
        if sum(e) == k:
            coef = math.factorial(k) / np.prod([math.factorial(a) for a in e])
            E = tuple(2 * a for a in e)
            terms[E] = terms.get(E, 0.0) + c * coef
    return MultiPoly(terms, n), kernel(form, n)


def _line_poly(p: MultiPoly, x) -> Poly:
    c = np.zeros(p.degree + 1)
    for e, v in p.terms.items():
        c[sum(e)] += v * np.prod(np.asarray(x) ** np.array(e))
    return Poly(c)


def _half_circle_oracle(p, om):
    # independent path: scipy quad over [0, pi) of Omega times the ladder p.v. integral of each line
    def f(th, part):
        x = [math.cos(th), math.sin(th)]
        v = om(np.array([x]))[0] * pv_1d(_line_poly(p, x), method="ladder").value
        return getattr(v, part)

    re = quad(f, 0, math.pi, args=("real",), epsabs=1e-9, limit=200)[0]
    im = quad(f, 0, math.pi, args=("imag",), epsabs=1e-9, limit=200)[0]
    return complex(re, im)


def test_c09_remark_agreement(report):
    worst, worst_oracle = 0.0, 0.0
    for i in range(20):
        p, om = _remark_case(i)
        a = In(p, om, tol=1e-8).value
        b = remark_odd(p, om, tol=1e-8).value
        worst = max(worst, abs(a - b) / (1 + abs(a)))
        if p.dim == 2:
            worst_oracle = max(worst_oracle, abs(a - _half_circle_oracle(p, om)) / (1 + abs(a)))
    ok = worst <= 1e-5 and worst_oracle <= 1e-5
    report("C9 odd-kernel cross-path agreement", ok,
           f"20 cases (12 n=2, 8 n=3), worst scaled diff {worst:.2e}; n=2 independent line oracle {worst_oracle:.2e}")
    assert ok


# 10 -------------------------------------------------------------------------


def test_c10_growth_shape(report):
    t0 = time.time()
    degrees = [2, 4, 8, 16, 32, 64]
    lines, ok = [], True
    for n, form in ((1, "sign"), (2, "cos:1")):
        rows, fit = growth_study(degrees, n, form, samples=200, seed=0, budget=500)
        sups = [r.sup_abs_integral for r in rows]
        ratio = sups[-1] / sups[1]
        ok &= fit.r2 >= 0.8 and ratio <= 4
        lines.append(f"n={n} {form}: R2 {fit.r2:.3f}, sup64/sup4 {ratio:.3f}")
    dt = time.time() - t0
    ok &= dt <= 1800
    report("C10 growth shape", ok, "; ".join(lines) + f", {dt:.0f}s")
    assert ok


# 11 -------------------------------------------------------------------------


def test_c11_certificate_ladder(report):
    lines, ok = [], True
    ratios = []
    for n, form, samples in ((1, "sign", 50), (2, "cos:1", 6)):
        om = kernel(form, n)
        ms, totals = [], []
        for m in range(1, 7):
            d = 1 << m
            for i in range(samples):
                p = random_poly_nd(np.random.default_rng([11, d, i]), n, d)
                cert = certificate(p, om, measure_tol=1e-4, max_evals=4000)
                ms.append(m)
                totals.append(cert.total_bracket)
                ratios.append(cert.measured / cert.total_bracket)
        r2 = _r2(ms, totals)
        ok &= r2 >= 0.9
        lines.append(f"n={n} {form} totals vs m R2 {r2:.3f}")
    c_hat = max(ratios)
    exceptions = sum(r > c_hat for r in ratios)
    ok &= math.isfinite(c_hat) and exceptions == 0
    report("C11 certificate ladder", ok, "; ".join(lines) + f"; global c_hat {c_hat:.4f}, exceptions {exceptions}")
    assert ok


# 12 -------------------------------------------------------------------------


def test_c12_invariances(report):
    cases = [(MultiPoly({(1,): 0.7, (2,): -0.4, (3,): 1.1}, 1), kernel("sign")),
             (MultiPoly({(2, 0): 1.0, (0, 2): 1.3, (1, 0): 0.5, (1, 1): -0.2}, 2), kernel("cos:1")),
             (MultiPoly({(2, 0): -1.0, (0, 2): -0.8, (0, 1): 0.6}, 2), kernel("sin:1"))]
    dil, cert_dil, conj = 0.0, 0.0, 0.0
    for p, om in cases:
        base = In(p, om, tol=1e-10).value
        c0 = certificate(p, om, measure=False).total_bracket
        for lam in (0.5, 3.0):
            v = In(p.dilate(lam), om, tol=1e-10).value
            dil = max(dil, abs(v - base) / abs(base))
            c1 = certificate(p.dilate(lam), om, measure=False).total_bracket
            cert_dil = max(cert_dil, abs(c1 - c0) / abs(c0))
        conj = max(conj, abs(In(-p, om, tol=1e-10).value - base.conjugate()))
    argv = [sys.executable, "-m", "osclog", "growth", "--n", "1", "--kernel", "sign",
            "--degrees", "2,4,8", "--samples", "5", "--budget", "20", "--seed", "3"]
    outs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    same = outs[0] == outs[1] and len(outs[0]) > 0
    ok = dil <= 1e-6 and cert_dil <= 1e-6 and conj <= 1e-8 and same
    report("C12 invariances", ok, f"dilation {dil:.1e}, certificate dilation {cert_dil:.1e}, "
                                  f"conjugation {conj:.1e}, byte-identical reruns {same}")
    assert ok
