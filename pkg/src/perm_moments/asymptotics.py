"""Closed-form large-n behaviour of the group averages.

For a grid with constant coefficient b00 not a non-positive integer, the
average over the symmetric group on n points behaves like

    n^(b00 - 1) / Gamma(b00) * prod_{(k1,k2) != (0,0)} (1 - base)^(-exponent),

with base/exponent arranged per randomization variant exactly as in the
generating-function factors.  When b00 is a non-positive integer the limit is
zero (geometrically fast for holomorphic grids; the rate is only observed
empirically, never computed).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .angles import MomentTable
from .classfun import CoeffGrid, EvalPoint, GridKind, Randomization, check_domain, expect_gf
from .errors import DomainError, PoleError

DEGENERATE_TOL = 1e-12

# Lanczos approximation, g = 7, 9 coefficients (public numerical constants).
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _near_nonpositive_integer(z: complex, tol: float = DEGENERATE_TOL) -> bool:
    q = round(z.real)
    return q <= 0 and abs(z - q) <= tol


def complex_gamma(z: complex) -> complex:
    """Gamma on the complex plane, Lanczos sum with reflection for Re z < 1/2."""
    z = complex(z)
    if _near_nonpositive_integer(z):
        raise PoleError(f"gamma pole at {z}")
    if z.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * z) * complex_gamma(1.0 - z))
    z -= 1.0
    acc = _LANCZOS[0]
    for i, coeff in enumerate(_LANCZOS[1:], start=1):
        acc += coeff / (z + i)
    t = z + 7.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * acc


def complex_binomial(s: complex, k: int) -> complex:
    """binom(s, k) = prod_{m=1}^{k} (s - m + 1) / m for complex s, integer k >= 0."""
    if k < 0:
        raise ValueError("k must be a non-negative integer")
    out = 1.0 + 0.0j
    for m in range(1, k + 1):
        out *= (s - m + 1) / m
    return out


def binomial_growth_ratio(s: complex, n: int) -> complex:
    """binom(n + s, n) divided by its leading form n^s / Gamma(s + 1).

    Tends to 1 with an O(1/n) residual whenever s is not a negative integer.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    denom = cmath.exp(complex(s) * math.log(n)) / complex_gamma(complex(s) + 1.0)
    return complex_binomial(n + complex(s), n) / denom


class Regime(enum.Enum):
    GENERIC = "generic"
    DEGENERATE_ZERO_LIMIT = "degenerate-zero-limit"


@dataclass(frozen=True)
class AsymptoticResult:
    """Leading large-n value n^(b00-1)/Gamma(b00) * constant, or the zero regime.

    ``constant`` is the (possibly truncated) prefactor product; ``tail_bound``
    certifies the modulus error from truncating it.  In the degenerate regime
    the value is exactly zero in the limit and decay is geometric for
    holomorphic grids; the rate is reported only as an empirical observation
    elsewhere, never computed here.
    """

    leading: complex
    exponent: complex
    constant: complex
    regime: Regime
    tail_bound: float = 0.0


def _prefactor(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    k_tail: int,
) -> tuple[complex, float]:
    x1, x2 = x.as_complex()
    log_sum = 0.0 + 0.0j
    dropped = 0.0
    for k1 in range(f.k1 + 1):
        for k2 in range(f.k2 + 1):
            if k1 == 0 and k2 == 0:
                continue
            b = complex(f.b[k1, k2])
            a = complex(alpha.alpha[k1, k2])
            if variant is Randomization.PER_CYCLE:
                c, e = x1**k1 * x2**k2, b * a
            else:
                c, e = a * x1**k1 * x2**k2, b
            if e == 0 or c == 0:
                continue
            if k1 + k2 > k_tail:
                dropped += abs(e) * abs(cmath.log(1.0 - c))
                continue
            log_sum += -e * cmath.log(1.0 - c)
    tail_log = dropped + _envelope_tail(f, x)
    constant = cmath.exp(log_sum)
    return constant, abs(constant) * math.expm1(tail_log)


def _envelope_tail(f: CoeffGrid, x: EvalPoint) -> float:
    """Bound on sum of |e log(1 - c)| over grid indices beyond the stored box."""
    if f.kind is not GridKind.HOLOMORPHIC:
        return 0.0
    x1, x2 = x.as_complex()
    u1 = abs(x1) / f.radii[0]
    u2 = abs(x2) / f.radii[1]
    if u1 >= 1.0 or u2 >= 1.0:
        raise DomainError("tail bound needs |x_i| < r_i")
    q = max(abs(x1), abs(x2))
    corner = 1.0 / ((1.0 - u1) * (1.0 - u2))
    box = (1.0 - u1 ** (f.k1 + 1)) * (1.0 - u2 ** (f.k2 + 1)) * corner
    return f.tail_const * (corner - box) / (1.0 - q)


def asymptotic_expect(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
    k_tail: int = 200,
) -> AsymptoticResult:
    """Evaluate the closed-form large-n behaviour at the given n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    check_domain(f, x, asymptotic=True)
    b00 = f.b00
    if _near_nonpositive_integer(b00):
        return AsymptoticResult(0.0j, b00 - 1.0, 0.0j, Regime.DEGENERATE_ZERO_LIMIT)
    constant, const_tail = _prefactor(f, alpha, variant, x, k_tail)
    scale = cmath.exp((b00 - 1.0) * math.log(n)) / complex_gamma(b00)
    return AsymptoticResult(
        scale * constant, b00 - 1.0, constant, Regime.GENERIC, abs(scale) * const_tail
    )


@dataclass(frozen=True)
class LimitMean:
    """Truncated product prod_{k>=1} (1 - x^k)^(-b_k) with a geometric tail bound."""

    value: complex
    tail_bound: float
    terms: int


def limit_product_mean(f: CoeffGrid, x: complex, k_tail: int = 200) -> LimitMean:
    """Mean of the limit variable: prod over k >= 1 of (1 - x^k)^(-b_k), truncated.

    This is the n-free limit of the per-cycle average for univariate grids
    with b_0 = 1; also the value the coupling sampler's mean must approach.
    """
    if not f.univariate:
        raise DomainError("limit product mean takes a univariate grid")
    check_domain(f, EvalPoint(x), asymptotic=True)
    terms = min(f.k1, k_tail)
    log_sum = 0.0 + 0.0j
    dropped = 0.0
    for k in range(1, f.k1 + 1):
        b = complex(f.b[k, 0])
        if b == 0:
            continue
        contrib = -b * cmath.log(1.0 - complex(x) ** k)
        if k <= k_tail:
            log_sum += contrib
        else:
            dropped += abs(contrib)
    value = cmath.exp(log_sum)
    tail_log = dropped
    if f.kind is GridKind.HOLOMORPHIC:
        u = abs(x) / f.radii[0]
        if u >= 1.0:
            raise DomainError("tail bound needs |x| < r")
        tail_log += f.tail_const * (u ** (f.k1 + 1)) / (1.0 - u) / (1.0 - abs(x))
    return LimitMean(value, abs(value) * math.expm1(tail_log), terms)


@dataclass(frozen=True)
class RatioRow:
    n: int
    expect: complex
    asym: complex
    ratio_abs: float


@dataclass(frozen=True)
class ReductionReport:
    """Numeric check that the generic/degenerate split behaves as claimed.

    Generic regime: |expect/asym| should drift to 1 along n_list.  Degenerate
    regime: |expect| should decay (checked as a monotone trend over the tail
    half of n_list).
    """

    rows: tuple[RatioRow, ...]
    regime: Regime
    final_ratio_error: float | None
    tail_monotone: bool | None

    def csv_rows(self) -> list[tuple]:
        return [
            (r.n, r.expect.real, r.expect.imag, r.asym.real, r.asym.imag, r.ratio_abs)
            for r in self.rows
        ]


def asymptotic_ratio_table(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n_list: list[int],
    order: int | None = None,
) -> ReductionReport:
    """Tabulate expectation vs closed-form asymptote along a list of n values."""
    if not n_list:
        return ReductionReport((), Regime.GENERIC, None, None)
    degenerate = _near_nonpositive_integer(f.b00)
    rows = []
    for n in sorted(n_list):
        value = expect_gf(f, alpha, variant, x, n, order)
        if degenerate:
            rows.append(RatioRow(n, value, 0.0j, float("nan")))
        else:
            asym = asymptotic_expect(f, alpha, variant, x, n).leading
            ratio = abs(value / asym) if asym != 0 else float("inf")
            rows.append(RatioRow(n, value, asym, ratio))
    if degenerate:
        tail = rows[len(rows) // 2 :]
        mags = [abs(r.expect) for r in tail]
        monotone = all(b < a for a, b in zip(mags, mags[1:])) if len(mags) > 1 else None
        return ReductionReport(tuple(rows), Regime.DEGENERATE_ZERO_LIMIT, None, monotone)
    final_err = abs(rows[-1].ratio_abs - 1.0)
    return ReductionReport(tuple(rows), Regime.GENERIC, final_err, None)
