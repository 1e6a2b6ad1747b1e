"""Truncated formal power series in one bookkeeping variable t.

Coefficients are complex doubles.  Products of factors (1 - c t)^(-e) are
never formed factor by factor: we sum the logarithms e * sum_m c^m t^m / m
first and exponentiate once.  That keeps results independent of factor order
and sidesteps branch cuts of complex powers entirely (the principal-branch
caveat of z^s never arises in coefficient space).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import OrderError


@dataclass(frozen=True)
class TruncSeries:
    """Coefficients h_0 .. h_N of a series truncated (inclusively) at order N."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coeffs must be a non-empty 1-D array")
        object.__setattr__(self, "coeffs", arr)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @staticmethod
    def one(order: int) -> "TruncSeries":
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = 1.0
        return TruncSeries(c)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and bool(np.array_equal(self.coeffs, other.coeffs))


class Factor(NamedTuple):
    """One factor (1 - c t)^(-e); both the base point c and the exponent e may be complex."""

    c: complex
    e: complex


FactorList = Sequence[Factor]


def series(coeffs: Iterable[complex]) -> TruncSeries:
    return TruncSeries(np.asarray(list(coeffs), dtype=np.complex128))


def coefficient(h: TruncSeries, n: int) -> complex:
    """[t^n] h.  Indices beyond the truncation order are an error, never silently zero."""
    if n < 0:
        raise OrderError(f"coefficient index must be non-negative, got {n}")
    if n > h.order:
        raise OrderError(f"coefficient {n} requested from a series truncated at order {h.order}")
    return complex(h.coeffs[n])


def mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product truncated at the common order."""
    if a.order != b.order:
        raise OrderError(f"order mismatch: {a.order} vs {b.order}")
    full = np.convolve(a.coeffs, b.coeffs)
    return TruncSeries(full[: a.order + 1])


def exp_series(a: TruncSeries) -> TruncSeries:
    """exp(a) for a series with zero constant term, exact to the truncation order.

    Uses the coefficient recurrence n h_n = sum_{k=1}^{n} k a_k h_{n-k}, i.e.
    h' = a' h, which needs no division by factorials and no branch choices.
    """
    if a.coeffs[0] != 0:
        raise OrderError("exp_series requires a zero constant term")
    n_max = a.order
    h = np.zeros(n_max + 1, dtype=np.complex128)
    h[0] = 1.0
    ka = a.coeffs * np.arange(n_max + 1)
    for n in range(1, n_max + 1):
        h[n] = np.dot(ka[1 : n + 1], h[n - 1 :: -1]) / n
    return TruncSeries(h)


def log_of_factor(c: complex, e: complex, order: int) -> TruncSeries:
    """log (1 - c t)^(-e) = e * sum_{m>=1} c^m t^m / m, truncated."""
    m = np.arange(1, order + 1)
    coeffs = np.zeros(order + 1, dtype=np.complex128)
    if order >= 1:
        coeffs[1:] = e * (complex(c) ** m) / m
    return TruncSeries(coeffs)


def binomial_factor(c: complex, e: complex, order: int) -> TruncSeries:
    """Expansion of (1 - c t)^(-e); coefficient n is binom(e - 1 + n, n) c^n."""
    return exp_series(log_of_factor(c, e, order))


def product_of_factors(factors: FactorList, order: int) -> TruncSeries:
    """prod_i (1 - c_i t)^(-e_i) via a single summed log and one exponential."""
    m = np.arange(1, order + 1)
    log_sum = np.zeros(order + 1, dtype=np.complex128)
    for c, e in factors:
        if e == 0:
            continue
        log_sum[1:] += e * (complex(c) ** m) / m
    return exp_series(TruncSeries(log_sum))


def exponential_formula(a: Sequence[complex], order: int) -> TruncSeries:
    """exp(sum_{m=1}^{order} a_m t^m / m) for a per-part-value sequence a_1, a_2, ...

    Coefficient n equals the partition sum sum_{|la|=n} (1/z_la) prod_m a_{la_m}:
    the weighted average of the multiplicative class function with per-part
    values a over the symmetric group on n points.
    """
    if len(a) < order:
        raise OrderError(f"need at least {order} per-part values, got {len(a)}")
    coeffs = np.zeros(order + 1, dtype=np.complex128)
    for m in range(1, order + 1):
        coeffs[m] = complex(a[m - 1]) / m
    return exp_series(TruncSeries(coeffs))
