import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre

from sturmian_green.errors import ConvergenceError
from sturmian_green.specfun import (
    CFTerms,
    Hyp2F1Params,
    assoc_laguerre,
    eval_continued_fraction,
    hyp2f1_ratio,
    hyp2f1_series,
    tfraction,
)


def sqrt2_by_iteration():
    # x = 1 + 1/(1 + x) has the fixed point sqrt(2)
    x = 1.0
    for _ in range(200):
        x = 1 + 1 / (1 + x)
    return x


def test_cf_sqrt2():
    expected = sqrt2_by_iteration()
    res = eval_continued_fraction(CFTerms(1, lambda p: 1, lambda p: 2), tol=1e-12)
    assert res.converged
    assert res.iterations <= 40
    assert res.value == pytest.approx(expected, rel=1e-12)
    assert res.value.real == pytest.approx(1.41421356, abs=1e-8)


def test_cf_zero_numerators_truncate():
    c = 0.3 - 2.1j
    res = eval_continued_fraction(CFTerms(c, lambda p: 0, lambda p: 5 + p))
    assert res.value == c
    assert res.iterations == 1
    assert res.converged


def test_cf_not_converged_is_reported():
    res = eval_continued_fraction(CFTerms(1, lambda p: 1, lambda p: 2), tol=1e-15, max_iter=3)
    assert not res.converged
    assert res.iterations == 3
    assert res.residual > 1e-15


@pytest.mark.parametrize("tol, max_iter", [(0, 10), (-1e-3, 10), (1e-10, 0), (1e-10, 2.5)])
def test_cf_rejects_bad_controls(tol, max_iter):
    with pytest.raises(ValueError):
        eval_continued_fraction(CFTerms(1, lambda p: 1, lambda p: 2), tol=tol, max_iter=max_iter)


def test_cf_floors_zero_denominators():
    # b0 = 0 and b(1) = 0 would divide by zero without the floor
    res = eval_continued_fraction(CFTerms(0, lambda p: 1, lambda p: 0 if p == 1 else 2))
    assert np.isfinite(res.value)


@pytest.mark.parametrize("M", [30, 60, 200])
def test_cf_truncation_consistency(M):
    terms = CFTerms(1, lambda p: -0.3 * p, lambda p: 1.5 + p)
    r1 = eval_continued_fraction(terms, max_iter=M)
    r2 = eval_continued_fraction(terms, max_iter=M + 20)
    if r1.converged:
        assert abs(r2.value - r1.value) <= r1.residual * abs(r1.value)


def test_tfraction_with_a_zero():
    # both 2F1 factors equal 1 when the first parameter is 0
    b, c, y = 1.7, 2.2 + 0.5j, 0.3 - 0.1j
    p = Hyp2F1Params(0, b, c, y)
    series_ratio = hyp2f1_series(p) / hyp2f1_series(Hyp2F1Params(0, b + 1, c + 1, y))
    assert series_ratio == 1
    assert tfraction(p).value == pytest.approx(c, rel=1e-13)
    assert hyp2f1_ratio(p) == pytest.approx(1, rel=1e-13)


def test_series_b_zero():
    assert hyp2f1_series(Hyp2F1Params(3.3 - 1j, 0, 1.5, 0.7)) == 1


def test_series_log_closed_form():
    y = 0.5
    expected = -math.log(1 - y) / y
    assert hyp2f1_series(Hyp2F1Params(1, 1, 2, y)) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(1.3862943611, abs=1e-10)


def test_series_polynomial_case():
    assert hyp2f1_series(Hyp2F1Params(-1, 3, 2, 0.25)) == pytest.approx(1 - 1.5 * 0.25, abs=1e-15)


def test_series_domain_and_c_validation():
    with pytest.raises(ValueError):
        hyp2f1_series(Hyp2F1Params(1, 1, 2, 1.0))
    with pytest.raises(ValueError):
        Hyp2F1Params(1, 1, -2, 0.3)
    with pytest.raises(ValueError):
        Hyp2F1Params(1, 1, 0, 0.3)


def test_series_cap_raises():
    # slowly convergent at |y| close to 1: the 100000-term cap is reached
    with pytest.raises(ConvergenceError):
        hyp2f1_series(Hyp2F1Params(1, 1, 1.0001, 0.99999999), tol=1e-16)


def test_ratio_polynomial_hand_value():
    # 2F1(-1,1;3;y) = 1 - y/3, 2F1(-1,2;4;y) = 1 - y/2
    assert hyp2f1_ratio(Hyp2F1Params(-1, 1, 3, 0.5)) == pytest.approx(10 / 9, rel=1e-14)


def test_ratio_rejects_cut():
    with pytest.raises(ValueError):
        hyp2f1_ratio(Hyp2F1Params(0.5, 1, 2, 1.5))


def test_ratio_nonconvergence_reports():
    with pytest.raises(ConvergenceError) as info:
        hyp2f1_ratio(Hyp2F1Params(0.5 + 1j, 2, 3.5, 0.99 + 0.1j), max_iter=5)
    assert info.value.iterations == 5


def test_ratio_random_against_series():
    rng = np.random.default_rng(7)
    y = 0.3 + 0.2j
    for _ in range(20):
        a, b, c = (rng.uniform(-3, 3) + 1j * rng.uniform(-3, 3) for _ in range(3))
        ref = hyp2f1_series(Hyp2F1Params(a, b, c, y)) / hyp2f1_series(Hyp2F1Params(a, b + 1, c + 1, y))
        assert hyp2f1_ratio(Hyp2F1Params(a, b, c, y)) == pytest.approx(ref, rel=1e-11)


complex_param = st.builds(
    complex,
    st.floats(-4, 4, allow_nan=False),
    st.floats(-4, 4, allow_nan=False),
)
disk_point = st.builds(
    lambda r, t: r * np.exp(1j * t),
    st.floats(0, 0.9),
    st.floats(-math.pi, math.pi),
)


def _clear_of_poles(c):
    return min(abs(c + n) for n in range(60)) > 0.2


@settings(max_examples=60, deadline=None)
@given(complex_param, complex_param, complex_param, disk_point)
def test_ratio_matches_series_quotient(a, b, c, y):
    if not (_clear_of_poles(c) and _clear_of_poles(c + 1)):
        return
    num = hyp2f1_series(Hyp2F1Params(a, b, c, y))
    den = hyp2f1_series(Hyp2F1Params(a, b + 1, c + 1, y))
    if abs(den) < 1e-3 or abs(num) < 1e-3:
        return
    got = hyp2f1_ratio(Hyp2F1Params(a, b, c, y))
    assert abs(got - num / den) <= 1e-10 * abs(num / den)


@settings(max_examples=60, deadline=None)
@given(complex_param, complex_param, complex_param, disk_point)
def test_contiguous_relation(a, b, c, y):
    # c(c+1) F(a,b;c) = (c+1)(c+(b-a+1)y) F(a,b+1;c+1) - (c-a+1)(b+1) y F(a,b+2;c+2)
    if not _clear_of_poles(c):
        return
    f0 = hyp2f1_series(Hyp2F1Params(a, b, c, y))
    f1 = hyp2f1_series(Hyp2F1Params(a, b + 1, c + 1, y))
    f2 = hyp2f1_series(Hyp2F1Params(a, b + 2, c + 2, y))
    lhs = c * (c + 1) * f0
    t1 = (c + 1) * (c + (b - a + 1) * y) * f1
    t2 = (c - a + 1) * (b + 1) * y * f2
    scale = max(abs(lhs), abs(t1), abs(t2))
    assert abs(lhs - (t1 - t2)) <= 1e-11 * scale


def laguerre_binomial_sum(n, alpha, x):
    return sum(
        (-1) ** k * math.comb(n + alpha, n - k) * x**k / math.factorial(k) for k in range(n + 1)
    )


def test_laguerre_low_orders():
    assert assoc_laguerre(0, 3.3, -7.0) == 1
    assert assoc_laguerre(1, 2, 0.5) == pytest.approx(2.5, abs=1e-15)


def test_laguerre_binomial_oracle():
    assert assoc_laguerre(5, 1, 2.0) == pytest.approx(laguerre_binomial_sum(5, 1, 2.0), rel=1e-13)


@pytest.mark.parametrize("n, alpha, x", [(7, 0, 3.1), (12, 4, 10.0), (20, 2, 0.25)])
def test_laguerre_matches_scipy(n, alpha, x):
    assert assoc_laguerre(n, alpha, x) == pytest.approx(eval_genlaguerre(n, alpha, x), rel=1e-11)


def test_laguerre_vectorized():
    x = np.linspace(0, 5, 7)
    np.testing.assert_allclose(assoc_laguerre(4, 2, x), eval_genlaguerre(4, 2, x), rtol=1e-12)


def test_laguerre_rejects_negative_order():
    with pytest.raises(ValueError):
        assoc_laguerre(-1, 0, 1.0)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 49), st.floats(0, 10), st.floats(-50, 50))
def test_laguerre_recurrence_residual(n, alpha, x):
    lm, l0, lp = (assoc_laguerre(k, alpha, x) for k in (n - 1, n, n + 1))
    terms = [(n + 1) * lp, (2 * n + 1 + alpha - x) * l0, (n + alpha) * lm]
    residual = terms[0] - terms[1] + terms[2]
    assert abs(residual) <= 1e-12 * max(abs(t) for t in terms)
