"""Randomized multiplicative class functions on the symmetric group.

A coefficient grid b[k1, k2] declares the function f(x1, x2) = sum b x1^k1
x2^k2.  Its associated class function evaluates f at (x1^m, x2^m) for every
part m of the cycle type and multiplies.  Randomization rotates the
evaluation points by circle-valued pairs (theta, vartheta): either one fresh
pair per cycle (PER_CYCLE) or one fresh pair per point, multiplied along each
cycle (PER_POINT).

Expectations over the symmetric group on n points are computed by two
mutually checking deterministic routes:

* ``expect_exact``   -- the class-equation partition sum with exact rational
                        class weights;
* ``expect_gf``      -- coefficient extraction from the product generating
                        function prod (1 - c t)^(-e), with a certified
                        truncation bound when the grid is a truncation of a
                        holomorphic function;

plus two literal brute-force oracles (``expect_bruteforce_sn`` over all n!
permutations, ``det_average_per_point`` over permutation matrices) for small n.

x1, x2 are always numeric evaluation points; the only series variable is the
bookkeeping variable t of the generating function.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import series as ts
from .angles import AngleDistribution, DiracOne, MomentTable, moments_of
from .errors import DomainError, SizeLimitError, TruncationError
from .estimate import MCEstimate
from .partitions import (
    Partition,
    EXHAUSTIVE_SN_CAP,
    centralizer_order,
    conjugacy_classes_by_enumeration,
    cycle_type_of,
    iter_partitions,
)
from .rng import substream

EXACT_SUM_CAP = 60
UNIT_TOL = 1e-9


class Randomization(enum.Enum):
    """How rotation pairs are attached to a permutation."""

    PER_CYCLE = "per-cycle"
    PER_POINT = "per-point"


class GridKind(enum.Enum):
    POLYNOMIAL = "polynomial"
    HOLOMORPHIC = "holomorphic-truncated"


@dataclass(frozen=True)
class CoeffGrid:
    """Coefficients b[k1, k2] of f, either exact (polynomial) or a truncation.

    Holomorphic truncations carry convergence radii (r1, r2) and a geometric
    tail constant C with |b[k1, k2]| <= C * (1/r1)^k1 * (1/r2)^k2; the stored
    coefficients are validated against that envelope at construction, and
    every downstream evaluation uses it to certify truncation error.
    """

    b: np.ndarray
    kind: GridKind = GridKind.POLYNOMIAL
    radii: tuple[float, float] | None = None
    tail_const: float | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.b, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("coefficient grid must be 1-D or 2-D and non-empty")
        object.__setattr__(self, "b", arr)
        if self.kind is GridKind.HOLOMORPHIC:
            if self.radii is None:
                raise ValueError("holomorphic grids must declare radii")
            r1, r2 = self.radii
            if not (r1 > 0 and r2 > 0):
                raise ValueError("radii must be positive")
            needed = _fit_tail_const(arr, self.radii)
            if self.tail_const is None:
                object.__setattr__(self, "tail_const", needed)
            elif self.tail_const < needed * (1 - 1e-12):
                raise ValueError(
                    f"declared tail constant {self.tail_const} below the fitted minimum {needed}"
                )
        elif self.radii is not None or self.tail_const is not None:
            raise ValueError("polynomial grids carry no radii or tail constant")

    @property
    def k1(self) -> int:
        return self.b.shape[0] - 1

    @property
    def k2(self) -> int:
        return self.b.shape[1] - 1

    @property
    def b00(self) -> complex:
        return complex(self.b[0, 0])

    @property
    def univariate(self) -> bool:
        return self.k2 == 0

    @staticmethod
    def polynomial(b: np.ndarray) -> "CoeffGrid":
        return CoeffGrid(np.asarray(b, dtype=np.complex128))

    @staticmethod
    def holomorphic(
        b: np.ndarray, radii: tuple[float, float], tail_const: float | None = None
    ) -> "CoeffGrid":
        return CoeffGrid(
            np.asarray(b, dtype=np.complex128), GridKind.HOLOMORPHIC, radii, tail_const
        )

    @staticmethod
    def from_univariate(coeffs, kind: GridKind = GridKind.POLYNOMIAL, radius: float | None = None,
                        tail_const: float | None = None) -> "CoeffGrid":
        arr = np.asarray(list(coeffs), dtype=np.complex128)[:, None]
        if kind is GridKind.POLYNOMIAL:
            return CoeffGrid(arr)
        return CoeffGrid(arr, kind, (radius, math.inf), tail_const)


def _fit_tail_const(b: np.ndarray, radii: tuple[float, float]) -> float:
    rho1 = 1.0 / radii[0]
    rho2 = 1.0 / radii[1]
    k1 = np.arange(b.shape[0])[:, None]
    k2 = np.arange(b.shape[1])[None, :]
    envelope = (rho1**k1) * (rho2**k2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(envelope > 0, np.abs(b) / np.where(envelope > 0, envelope, 1.0), np.inf)
    needed = float(np.max(ratios))
    if not np.isfinite(needed):
        raise ValueError("coefficients incompatible with declared radii")
    return needed


def one_minus_x() -> CoeffGrid:
    """The characteristic-polynomial generator f(x) = 1 - x."""
    return CoeffGrid.from_univariate([1.0, -1.0])


def char_poly_grid(s1: int, s2: int) -> CoeffGrid:
    """Coefficients of (1 - x1)^s1 (1 - x2)^s2."""
    c1 = np.array([math.comb(s1, k) * (-1.0) ** k for k in range(s1 + 1)])
    c2 = np.array([math.comb(s2, k) * (-1.0) ** k for k in range(s2 + 1)])
    return CoeffGrid(np.outer(c1, c2).astype(np.complex128))


def geometric_grid(k_max: int) -> CoeffGrid:
    """Truncation of f(x) = 1/(1 - x) at degree k_max (radius 1, tail constant 1)."""
    return CoeffGrid.from_univariate(
        np.ones(k_max + 1), GridKind.HOLOMORPHIC, radius=1.0, tail_const=1.0
    )


def grid_product(f1: CoeffGrid, f2: CoeffGrid) -> CoeffGrid:
    """Coefficient grid of the pointwise product f1 * f2 (polynomial grids only)."""
    if f1.kind is not GridKind.POLYNOMIAL or f2.kind is not GridKind.POLYNOMIAL:
        raise DomainError("grid_product is defined for polynomial grids")
    out = np.zeros((f1.k1 + f2.k1 + 1, f1.k2 + f2.k2 + 1), dtype=np.complex128)
    for a in range(f1.k1 + 1):
        for b in range(f1.k2 + 1):
            if f1.b[a, b] == 0:
                continue
            out[a : a + f2.k1 + 1, b : b + f2.k2 + 1] += f1.b[a, b] * f2.b
    return CoeffGrid(out)


@dataclass(frozen=True)
class EvalPoint:
    """Numeric evaluation point (x1, x2); univariate grids ignore x2."""

    x1: complex
    x2: complex = 0.0

    def as_complex(self) -> tuple[complex, complex]:
        return complex(self.x1), complex(self.x2)


def check_domain(f: CoeffGrid, x: EvalPoint, asymptotic: bool = False) -> None:
    """Validate x against the grid's domain.

    Series and exact routes need |x_i| <= 1, strictly inside the radii for
    holomorphic truncations.  Asymptotic routes need |x_i| < min(r_i, 1)
    strictly.
    """
    x1, x2 = x.as_complex()
    radii = f.radii if f.radii is not None else (math.inf, math.inf)
    for xi, ri in ((x1, radii[0]), (x2, radii[1])):
        if asymptotic:
            if abs(xi) >= min(ri, 1.0):
                raise DomainError(f"asymptotics need |x| < min(r, 1); got |x| = {abs(xi)}")
        else:
            if abs(xi) > 1.0 + UNIT_TOL:
                raise DomainError(f"evaluation needs |x| <= 1; got |x| = {abs(xi)}")
            if f.kind is GridKind.HOLOMORPHIC and abs(xi) >= ri:
                raise DomainError(f"evaluation needs |x| < radius {ri}; got |x| = {abs(xi)}")


def _check_alpha(f: CoeffGrid, alpha: MomentTable) -> None:
    if alpha.shape != f.b.shape:
        raise ValueError(f"moment table shape {alpha.shape} does not match grid {f.b.shape}")


def grid_value(b: np.ndarray, x1: complex, x2: complex) -> complex:
    """sum b[k1, k2] x1^k1 x2^k2 by direct evaluation (0^0 = 1)."""
    p1 = np.power(complex(x1), np.arange(b.shape[0]))
    p2 = np.power(complex(x2), np.arange(b.shape[1]))
    return complex(p1 @ b @ p2)


def assoc_class_value(f: CoeffGrid, la: Partition, x: EvalPoint) -> complex:
    """prod over parts m of f(x1^m, x2^m): the class function value on cycle type la."""
    check_domain(f, x)
    x1, x2 = x.as_complex()
    value = 1.0 + 0.0j
    for m in la.parts:
        value *= grid_value(f.b, x1**m, x2**m)
    return value


def _per_part_values(
    f: CoeffGrid, alpha: MomentTable, variant: Randomization, x: EvalPoint, n: int
) -> np.ndarray:
    """v[m] = expected factor contributed by one cycle of length m, m = 1..n."""
    x1, x2 = x.as_complex()
    values = np.zeros(n + 1, dtype=np.complex128)
    for m in range(1, n + 1):
        if variant is Randomization.PER_CYCLE:
            eff = f.b * alpha.alpha
        else:
            eff = f.b * alpha.alpha**m
        values[m] = grid_value(eff, x1**m, x2**m)
    return values


def expect_exact(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
) -> complex:
    """Expectation over the symmetric group on n points via the class equation.

    Sums (1/z_la) * prod over parts of the per-cycle expected factor, with
    exact rational weights converted to float only when applied.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > EXACT_SUM_CAP:
        raise SizeLimitError(f"exact partition sum capped at n <= {EXACT_SUM_CAP}")
    _check_alpha(f, alpha)
    check_domain(f, x)
    if n == 0:
        return 1.0 + 0.0j
    v = _per_part_values(f, alpha, variant, x, n)
    total = 0.0 + 0.0j
    for la in iter_partitions(n):
        prod = 1.0 + 0.0j
        for m in la.parts:
            prod *= v[m]
        total += float(Fraction(1, centralizer_order(la))) * prod
    return complex(total)


def build_factors(
    f: CoeffGrid, alpha: MomentTable, variant: Randomization, x: EvalPoint
) -> list[ts.Factor]:
    """Factors (1 - c t)^(-e) of the product generating function at the point x.

    PER_CYCLE folds the moments into the exponents (c = x1^k1 x2^k2,
    e = b * alpha); PER_POINT folds them into the base (c = alpha x1^k1 x2^k2,
    e = b).
    """
    _check_alpha(f, alpha)
    x1, x2 = x.as_complex()
    factors: list[ts.Factor] = []
    for k1 in range(f.k1 + 1):
        for k2 in range(f.k2 + 1):
            b = complex(f.b[k1, k2])
            a = complex(alpha.alpha[k1, k2])
            if variant is Randomization.PER_CYCLE:
                c, e = x1**k1 * x2**k2, b * a
            else:
                c, e = a * x1**k1 * x2**k2, b
            if e == 0 or c == 0:
                continue
            if abs(c) > 1.0 + UNIT_TOL:
                raise DomainError(f"factor base |c| = {abs(c)} exceeds 1")
            factors.append(ts.Factor(c, e))
    return factors


def _gf_truncation_bound(
    f: CoeffGrid, x: EvalPoint, n: int, order: int, log_sum: np.ndarray
) -> float:
    """Certified bound on the coefficient error from truncating the grid.

    The dropped factors change the log of the generating function by D with
    |D_m| <= T_m / m, where T_m sums the tail envelope C rho1^k1 rho2^k2
    |x1^k1 x2^k2|^m over indices outside the stored box.  The coefficient
    error is then bounded by [t^n] exp(|S|) (exp(D_hat) - 1), a series with
    non-negative coefficients.  Valid for both randomization variants since
    |alpha| <= 1.
    """
    if f.kind is not GridKind.HOLOMORPHIC:
        return 0.0
    x1, x2 = x.as_complex()
    rho1 = 1.0 / f.radii[0]
    rho2 = 1.0 / f.radii[1]
    u1_base = rho1 * abs(x1)
    u2_base = rho2 * abs(x2)
    if u1_base >= 1.0 or u2_base >= 1.0:
        raise DomainError("holomorphic truncation bound needs |x_i| < r_i")
    m = np.arange(1, order + 1, dtype=float)
    u1 = u1_base ** m
    u2 = u2_base ** m
    full = 1.0 / ((1.0 - u1) * (1.0 - u2))
    box = (1.0 - u1 ** (f.k1 + 1)) * (1.0 - u2 ** (f.k2 + 1)) * full
    t_m = f.tail_const * (full - box)
    delta_hat = np.zeros(order + 1)
    delta_hat[1:] = t_m / m
    s_hat = np.abs(log_sum)
    s_hat[0] = 0.0
    exp_s = ts.exp_series(ts.TruncSeries(s_hat.astype(np.complex128)))
    exp_d = ts.exp_series(ts.TruncSeries(delta_hat.astype(np.complex128)))
    # (exp(D) - 1) has the same coefficients as exp(D) except at order 0.
    tail = exp_d.coeffs.copy()
    tail[0] = 0.0
    bound_series = np.convolve(np.abs(exp_s.coeffs), np.abs(tail))[: order + 1]
    return float(bound_series[n].real)


@dataclass(frozen=True)
class GfReport:
    """Coefficient value plus the certified truncation bound of the gf route.

    The bound covers the coefficients dropped beyond the stored grid, plus a
    small floating-point cushion proportional to the value and the series
    order (the exp recurrence accumulates O(order * eps) rounding).
    """

    value: complex
    trunc_bound: float
    order: int


def gf_report(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
    order: int | None = None,
) -> GfReport:
    """Generating-function route with its truncation certificate."""
    if n < 0:
        raise ValueError("n must be non-negative")
    check_domain(f, x)
    if order is None:
        order = n
    if order < n:
        raise ValueError(f"series order {order} below requested coefficient {n}")
    factors = build_factors(f, alpha, variant, x)
    m = np.arange(1, order + 1)
    log_sum = np.zeros(order + 1, dtype=np.complex128)
    for c, e in factors:
        log_sum[1:] += e * (complex(c) ** m) / m
    h = ts.exp_series(ts.TruncSeries(log_sum))
    value = ts.coefficient(h, n)
    bound = _gf_truncation_bound(f, x, n, order, log_sum)
    if bound > 0.0:
        bound += (order + 16) * np.finfo(float).eps * abs(value)
    return GfReport(value, bound, order)


def expect_gf(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
    order: int | None = None,
    tol: float | None = None,
) -> complex:
    """Expectation over the symmetric group on n points by coefficient extraction.

    For holomorphic truncations, ``tol`` (when given) rejects results whose
    certified truncation bound exceeds it.
    """
    report = gf_report(f, alpha, variant, x, n, order)
    if tol is not None and report.trunc_bound > tol:
        raise TruncationError(
            f"truncation bound {report.trunc_bound:.3e} exceeds tolerance {tol:.3e}"
        )
    return report.value


def derivative_moment_fd(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
    order: int | None = None,
    step: float = 1e-5,
) -> complex:
    """d/dx1 of the expectation, by central finite differences on expect_gf.

    Approximate by construction (step^2 truncation error); exposed for
    derivative moments of the randomized characteristic polynomial.
    """
    x1, x2 = x.as_complex()
    up = expect_gf(f, alpha, variant, EvalPoint(x1 + step, x2), n, order)
    down = expect_gf(f, alpha, variant, EvalPoint(x1 - step, x2), n, order)
    return (up - down) / (2 * step)


def _class_allocation(classes, total_trials: int, group_order: int) -> list[int]:
    return [max(1, round(total_trials * size / group_order)) for _, size in classes]


def _sample_class_values(
    f: CoeffGrid,
    dist: AngleDistribution,
    variant: Randomization,
    x: EvalPoint,
    la: Partition,
    trials: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draws of the randomized class function on one cycle type."""
    x1, x2 = x.as_complex()
    parts = la.parts
    values = np.ones(trials, dtype=np.complex128)
    if variant is Randomization.PER_CYCLE:
        for m in parts:
            theta, vartheta = dist.sample(rng, trials)
            values *= _grid_value_vec(f.b, theta * x1**m, vartheta * x2**m)
    else:
        theta, vartheta = dist.sample(rng, trials * la.size)
        theta = theta.reshape(trials, la.size)
        vartheta = vartheta.reshape(trials, la.size)
        offset = 0
        for m in parts:
            t_prod = theta[:, offset : offset + m].prod(axis=1)
            v_prod = vartheta[:, offset : offset + m].prod(axis=1)
            offset += m
            values *= _grid_value_vec(f.b, t_prod * x1**m, v_prod * x2**m)
    return values


def _grid_value_vec(b: np.ndarray, a1: np.ndarray, a2: np.ndarray) -> np.ndarray:
    p1 = a1[:, None] ** np.arange(b.shape[0])
    p2 = a2[:, None] ** np.arange(b.shape[1])
    return np.einsum("tk,kl,tl->t", p1, b, p2)


def expect_bruteforce_sn(
    f: CoeffGrid,
    dist: AngleDistribution,
    variant: Randomization,
    x: EvalPoint,
    n: int,
    trials: int = 0,
    seed: int = 0,
) -> MCEstimate:
    """Literal average over all n! permutations with sampled rotations.

    Permutations are enumerated and cycle-decomposed literally; each class
    receives a share of ``trials`` proportional to its literally counted
    size, which reproduces the per-permutation sampling estimator exactly.
    With no rotation randomness (DiracOne) the average is exact and the
    reported standard error is zero.
    """
    if n > EXHAUSTIVE_SN_CAP:
        raise SizeLimitError(f"brute force over permutations capped at n <= {EXHAUSTIVE_SN_CAP}")
    check_domain(f, x)
    classes = conjugacy_classes_by_enumeration(n)
    group_order = sum(size for _, size in classes)
    if isinstance(dist, DiracOne):
        total = 0.0 + 0.0j
        for la, size in classes:
            total += (size / group_order) * assoc_class_value(f, la, x)
        return MCEstimate(total, 0.0, group_order, seed)
    if trials < 1:
        raise ValueError("randomized brute force needs trials >= 1")
    alloc = _class_allocation(classes, trials, group_order)
    mean = 0.0 + 0.0j
    variance = 0.0
    used = 0
    for idx, ((la, size), t_la) in enumerate(zip(classes, alloc)):
        rng = substream(seed, idx)
        draws = _sample_class_values(f, dist, variant, x, la, t_la, rng)
        w = size / group_order
        class_mean = draws.mean()
        mean += w * class_mean
        centered = draws - class_mean
        class_var = float(np.mean(centered.real**2 + centered.imag**2))
        variance += (w**2) * class_var / t_la
        used += t_la
    return MCEstimate(complex(mean), math.sqrt(variance), used, seed)


def _permutation_matrices(n: int) -> tuple[list[np.ndarray], list[Partition], list[list[list[int]]]]:
    import itertools

    mats: list[np.ndarray] = []
    types: list[Partition] = []
    cycles_per_perm: list[list[list[int]]] = []
    for perm in itertools.permutations(range(n)):
        g = np.zeros((n, n))
        for j in range(n):
            g[perm[j], j] = 1.0
        mats.append(g)
        types.append(cycle_type_of(perm))
        seen = [False] * n
        cycles: list[list[int]] = []
        for start in range(n):
            if seen[start]:
                continue
            cyc = []
            j = start
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = perm[j]
            cycles.append(cyc)
        cycles_per_perm.append(cycles)
    return mats, types, cycles_per_perm


def det_average_per_point(
    x: complex,
    dist: AngleDistribution,
    n: int,
    trials: int = 1,
    seed: int = 0,
    check_tol: float = 1e-10,
) -> MCEstimate:
    """Average det(I - x D g) over all permutation matrices and sampled diagonals.

    Every sampled determinant is cross-validated against the cycle-product
    form prod_m (1 - x^{len_m} prod_{i in cycle m} d_i) to ``check_tol``;
    a mismatch raises, since it would mean the two definitions of the
    per-point randomization disagree.
    """
    if n > EXHAUSTIVE_SN_CAP:
        raise SizeLimitError(f"matrix average capped at n <= {EXHAUSTIVE_SN_CAP}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mats, _, cycles_per_perm = _permutation_matrices(n)
    rng = substream(seed, 0)
    diag, _ = dist.sample(rng, trials * n)
    diag = diag.reshape(trials, n)
    eye = np.eye(n)
    per_trial = np.zeros(trials, dtype=np.complex128)
    for g, cycles in zip(mats, cycles_per_perm):
        batch = eye[None, :, :] - complex(x) * diag[:, :, None] * g[None, :, :]
        dets = np.linalg.det(batch)
        formula = np.ones(trials, dtype=np.complex128)
        for cyc in cycles:
            formula *= 1.0 - complex(x) ** len(cyc) * diag[:, cyc].prod(axis=1)
        worst = float(np.max(np.abs(dets - formula))) if trials else 0.0
        if worst > check_tol:
            raise DomainError(
                f"determinant and cycle-product disagree by {worst:.3e} (> {check_tol:.1e})"
            )
        per_trial += dets
    per_trial /= len(mats)
    mean = complex(per_trial.mean())
    centered = per_trial - mean
    var = float(np.mean(centered.real**2 + centered.imag**2))
    stderr = math.sqrt(var / trials)
    return MCEstimate(mean, stderr, trials, seed)


def folded_grid(f: CoeffGrid, alpha: MomentTable) -> CoeffGrid:
    """Effective grid b * alpha: the deterministic surrogate of PER_CYCLE randomization.

    Since |alpha| <= 1, a holomorphic envelope for b is still valid for the
    folded coefficients, so kind, radii and tail constant carry over.
    """
    _check_alpha(f, alpha)
    folded = f.b * alpha.alpha
    if f.kind is GridKind.HOLOMORPHIC:
        return CoeffGrid(folded, f.kind, f.radii, f.tail_const)
    return CoeffGrid(folded)
