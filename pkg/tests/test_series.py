import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perm_moments.errors import OrderError
from perm_moments.partitions import centralizer_order, iter_partitions
from perm_moments.series import (
    Factor,
    TruncSeries,
    binomial_factor,
    coefficient,
    exp_series,
    exponential_formula,
    log_of_factor,
    mul,
    product_of_factors,
    series,
)

finite_complex = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def log_series_oracle(h: TruncSeries) -> TruncSeries:
    """log of a series with constant term 1, via l' = h'/h (test-side oracle)."""
    n_max = h.order
    l = np.zeros(n_max + 1, dtype=np.complex128)
    for n in range(1, n_max + 1):
        acc = n * h.coeffs[n]
        for k in range(1, n):
            acc -= k * l[k] * h.coeffs[n - k]
        l[n] = acc / n
    return TruncSeries(l)


def partition_sum_oracle(a, n) -> complex:
    """sum over partitions of n of (1/z) prod a[part]; brute reference."""
    total = 0.0 + 0.0j
    for la in iter_partitions(n):
        prod = 1.0 + 0.0j
        for m in la.parts:
            prod *= a[m - 1]
        total += prod / centralizer_order(la)
    return total


def test_mul_examples():
    a = series([1, 1, 0])
    b = series([1, -1, 0])
    assert np.allclose(mul(a, b).coeffs, [1, 0, -1])
    one = TruncSeries.one(2)
    assert mul(a, one) == a
    geo = series([1] * 6)
    inv = series([1, -1, 0, 0, 0, 0])
    assert np.allclose(mul(geo, inv).coeffs, [1, 0, 0, 0, 0, 0])


def test_mul_order_mismatch():
    with pytest.raises(OrderError):
        mul(series([1, 0]), series([1, 0, 0]))


def test_exp_examples():
    assert np.allclose(exp_series(series([0])).coeffs, [1])
    assert np.allclose(exp_series(series([0, 1, 0, 0])).coeffs, [1, 1, 0.5, 1 / 6])
    harmonic = series([0] + [1.0 / m for m in range(1, 5)])
    assert np.allclose(exp_series(harmonic).coeffs, [1, 1, 1, 1, 1])


def test_exp_requires_zero_constant_term():
    with pytest.raises(OrderError):
        exp_series(series([1, 1]))


def test_binomial_factor_examples():
    assert np.allclose(binomial_factor(1.0, 2.0, 5).coeffs, np.arange(1, 7))
    # polynomial case: exponent -1 makes (1 - c t)^1
    f = binomial_factor(0.5, -1.0, 4)
    assert np.allclose(f.coeffs, [1, -0.5, 0, 0, 0], atol=1e-15)
    # Vandermonde example: exponent binom(2, 1) = 2 gives coefficients n + 1
    assert np.allclose(binomial_factor(1.0, 2.0, 9).coeffs, np.arange(1, 11))


def test_product_of_factors_cancellation_and_geometric():
    x = 0.37 + 0.21j
    cancel = product_of_factors([Factor(x, 1.0), Factor(x, -1.0)], 8)
    assert np.allclose(cancel.coeffs, TruncSeries.one(8).coeffs, atol=1e-14)
    geo = product_of_factors([Factor(1.0, 1.0)], 3)
    assert np.allclose(geo.coeffs, [1, 1, 1, 1])


def test_product_of_factors_matches_mul_oracle():
    # (1 - 0.3 t) / (1 - t): dual route through explicit expansion + Cauchy mul
    n = 12
    via_product = product_of_factors([Factor(1.0, 1.0), Factor(0.3, -1.0)], n)
    via_mul = mul(binomial_factor(1.0, 1.0, n), binomial_factor(0.3, -1.0, n))
    assert np.allclose(via_product.coeffs, via_mul.coeffs, atol=1e-13)


def test_exponential_formula_examples():
    ones = exponential_formula([1.0] * 6, 6)
    assert np.allclose(ones.coeffs, np.ones(7))
    zeros = exponential_formula([0.0] * 4, 4)
    assert np.allclose(zeros.coeffs, [1, 0, 0, 0, 0])
    x = 0.5
    a = [1 - x**m for m in range(1, 7)]
    h = exponential_formula(a, 6)
    for n in range(7):
        assert abs(coefficient(h, n) - partition_sum_oracle(a, n)) < 1e-12


def test_coefficient_bounds():
    h = series([1, 2, 3])
    assert coefficient(h, 2) == 3
    with pytest.raises(OrderError):
        coefficient(h, 3)
    with pytest.raises(OrderError):
        coefficient(h, -1)


def test_coefficient_known_values():
    geo = binomial_factor(1.0, 1.0, 7)
    assert abs(coefficient(geo, 7) - 1) < 1e-14
    e = exp_series(series([0, 1] + [0] * 6))
    assert abs(coefficient(e, 2) - 0.5) < 1e-15


@settings(max_examples=40, deadline=None)
@given(st.lists(finite_complex, min_size=3, max_size=8), st.lists(finite_complex, min_size=3, max_size=8))
def test_mul_commutative(a, b):
    n = min(len(a), len(b)) - 1
    sa, sb = series(a[: n + 1]), series(b[: n + 1])
    assert np.allclose(mul(sa, sb).coeffs, mul(sb, sa).coeffs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(finite_complex, min_size=4, max_size=7),
    st.lists(finite_complex, min_size=4, max_size=7),
    st.lists(finite_complex, min_size=4, max_size=7),
)
def test_mul_associative(a, b, c):
    n = min(len(a), len(b), len(c)) - 1
    sa, sb, sc = series(a[: n + 1]), series(b[: n + 1]), series(c[: n + 1])
    left = mul(mul(sa, sb), sc)
    right = mul(sa, mul(sb, sc))
    assert np.allclose(left.coeffs, right.coeffs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False), min_size=2, max_size=9))
def test_exp_log_roundtrip(tail):
    h = series([1.0] + list(tail))
    back = exp_series(log_series_oracle(h))
    assert np.allclose(back.coeffs, h.coeffs, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(finite_complex, min_size=1, max_size=12),
    st.integers(min_value=1, max_value=12),
)
def test_exponential_formula_matches_partition_sum(a, n):
    n = min(n, len(a))
    h = exponential_formula(a, n)
    for k in range(n + 1):
        expected = partition_sum_oracle(a, k)
        assert abs(coefficient(h, k) - expected) <= 1e-11 * max(1.0, abs(expected))


def test_log_of_factor_is_series_log():
    f = binomial_factor(0.7, 1.3 + 0.4j, 10)
    assert np.allclose(
        log_series_oracle(f).coeffs, log_of_factor(0.7, 1.3 + 0.4j, 10).coeffs, atol=1e-12
    )
