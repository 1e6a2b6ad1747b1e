"""Averages over the alternating group and Weyl groups of SO(2n), SO(2n+1), SU(n).

Each variant reduces to symmetric-group machinery:

* alternating: the average over even permutations is the plain average plus
  the signature-weighted average; the signature weight flips the sign of the
  bookkeeping variable, giving a second product with (1 + c t) factors;
* SO(2n): elements factor uniquely as (diagonal of +-1) x (permutation), so
  the average is the per-point randomized average with the two-point
  rotation law on {+1, -1};
* SO(2n+1): same diagonal part over even permutations only;
* SU(n): the permutation action restricted to the zero-sum subspace; the
  full-space determinant divides by (1 - x) per variable.

Every route is paired with a literal brute-force enumeration of the group.
"""

from __future__ import annotations

import enum
import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import series as ts
from .angles import AngleDistribution, DiracOne, MomentTable, RootsOfUnityConjugate, moments_of
from .classfun import (
    CoeffGrid,
    EvalPoint,
    Randomization,
    build_factors,
    char_poly_grid,
    check_domain,
    expect_bruteforce_sn,
    expect_gf,
    grid_value,
    _per_part_values,
)
from .errors import DomainError, SizeLimitError
from .estimate import MCEstimate
from .partitions import (
    Partition,
    centralizer_order,
    cycle_type_of,
    iter_partitions,
    signature,
)

EXACT_SUM_CAP = 60
ALTERNATING_BRUTE_CAP = 8
SIGNED_PERM_BRUTE_CAP = 5
SU_BRUTE_CAP = 8


class GroupKind(enum.Enum):
    SYMMETRIC = "symmetric"
    ALTERNATING = "alternating"
    WEYL_SO_EVEN = "weyl-so-even"
    WEYL_SO_ODD = "weyl-so-odd"
    WEYL_SU = "weyl-su"


def _signed_factors(
    f: CoeffGrid, alpha: MomentTable, variant: Randomization, x: EvalPoint
) -> list[ts.Factor]:
    """Factors of the signature-weighted generating function.

    Weighting by the signature turns each factor (1 - c t)^(-e) into
    (1 + c t)^(+e), i.e. (c, e) -> (-c, -e).
    """
    return [ts.Factor(-c, -e) for c, e in build_factors(f, alpha, variant, x)]


def signed_expect_gf(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
    order: int | None = None,
) -> complex:
    """Signature-weighted symmetric-group average, by coefficient extraction."""
    check_domain(f, x)
    if order is None:
        order = n
    h = ts.product_of_factors(_signed_factors(f, alpha, variant, x), order)
    return ts.coefficient(h, n)


def signed_expect_exact(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
) -> complex:
    """Signature-weighted symmetric-group average via the class equation."""
    if n > EXACT_SUM_CAP:
        raise SizeLimitError(f"exact partition sum capped at n <= {EXACT_SUM_CAP}")
    check_domain(f, x)
    if n == 0:
        return 1.0 + 0.0j
    v = _per_part_values(f, alpha, variant, x, n)
    total = 0.0 + 0.0j
    for la in iter_partitions(n):
        prod = 1.0 + 0.0j
        for m in la.parts:
            prod *= v[m]
        total += signature(la) * float(Fraction(1, centralizer_order(la))) * prod
    return complex(total)


def expect_an_exact(
    f: CoeffGrid,
    alpha: MomentTable,
    variant: Randomization,
    x: EvalPoint,
    n: int,
) -> complex:
    """Average over the alternating group via doubled even-class weights.

    For n in {0, 1} the alternating group is trivial and the average is the
    identity-class value.
    """
    if n > EXACT_SUM_CAP:
        raise SizeLimitError(f"exact partition sum capped at n <= {EXACT_SUM_CAP}")
    check_domain(f, x)
    if n == 0:
        return 1.0 + 0.0j
    v = _per_part_values(f, alpha, variant, x, n)
    if n == 1:
        return complex(v[1])
    total = 0.0 + 0.0j
    for la in iter_partitions(n):
        if signature(la) != 1:
            continue
        prod = 1.0 + 0.0j
        for m in la.parts:
            prod *= v[m]
        total += 2.0 * float(Fraction(1, centralizer_order(la))) * prod
    return complex(total)


def _weyl_setup(spec: tuple[int, int]) -> tuple[CoeffGrid, MomentTable]:
    s1, s2 = spec
    if s1 < 0 or s2 < 0:
        raise ValueError("exponents must be non-negative integers")
    grid = char_poly_grid(s1, s2)
    alpha = moments_of(RootsOfUnityConjugate(2), s1, s2)
    return grid, alpha


def expect_group_gf(
    group: GroupKind,
    spec,
    alpha: MomentTable | None,
    variant: Randomization,
    x: EvalPoint,
    n: int,
    order: int | None = None,
) -> complex:
    """Group average by generating function, dispatched on the group kind.

    ``spec`` is a CoeffGrid for the symmetric and alternating groups, and an
    integer exponent pair (s1, s2) of the characteristic-polynomial moment
    for the Weyl variants (whose rotation law is built in).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if group is GroupKind.SYMMETRIC:
        return expect_gf(spec, alpha, variant, x, n, order)
    if group is GroupKind.ALTERNATING:
        if alpha is None:
            raise ValueError("alternating averages need a moment table")
        if n <= 1:
            return expect_an_exact(spec, alpha, variant, x, n)
        minus = expect_gf(spec, alpha, variant, x, n, order)
        plus = signed_expect_gf(spec, alpha, variant, x, n, order)
        return minus + plus
    if group is GroupKind.WEYL_SO_EVEN:
        grid, a2 = _weyl_setup(spec)
        return expect_gf(grid, a2, Randomization.PER_POINT, x, n, order)
    if group is GroupKind.WEYL_SO_ODD:
        grid, a2 = _weyl_setup(spec)
        if n <= 1:
            return expect_an_exact(grid, a2, Randomization.PER_POINT, x, n)
        minus = expect_gf(grid, a2, Randomization.PER_POINT, x, n, order)
        plus = signed_expect_gf(grid, a2, Randomization.PER_POINT, x, n, order)
        return minus + plus
    if group is GroupKind.WEYL_SU:
        s1, s2 = spec
        x1, x2 = x.as_complex()
        if (s1 > 0 and x1 == 1) or (s2 > 0 and x2 == 1):
            raise DomainError("the zero-sum restriction needs x != 1")
        grid = char_poly_grid(s1, s2)
        a1 = moments_of(DiracOne(), s1, s2)
        divisor = (1.0 - x1) ** s1 * (1.0 - x2) ** s2
        outside = expect_gf(grid, a1, Randomization.PER_CYCLE, x, n, order) / divisor
        # Dividing the whole series by the t-free scalar and then extracting
        # must give the same number; keep both readings glued together.
        h = ts.product_of_factors(build_factors(grid, a1, Randomization.PER_CYCLE, x), order or n)
        inside = ts.coefficient(ts.TruncSeries(h.coeffs / divisor), n)
        if abs(inside - outside) > 1e-12 * max(1.0, abs(outside)):
            raise DomainError("scalar-divisor readings diverged; should be impossible")
        return outside
    raise ValueError(f"unknown group kind {group}")


@lru_cache(maxsize=None)
def _even_classes_by_enumeration(n: int) -> tuple[tuple[Partition, int], ...]:
    """Literal even-permutation census: (cycle type, class size within A_n)."""
    buckets: dict[Partition, int] = {}
    for perm in itertools.permutations(range(n)):
        la = cycle_type_of(perm)
        if (n - la.length) % 2 == 0:
            buckets[la] = buckets.get(la, 0) + 1
    return tuple(sorted(buckets.items(), key=lambda kv: kv[0].parts, reverse=True))


def _atom_expected_factors(
    f: CoeffGrid,
    dist: AngleDistribution,
    variant: Randomization,
    x: EvalPoint,
    n: int,
) -> np.ndarray:
    """Exact per-cycle expected factors v[m] using the distribution's atoms.

    Finite-atom laws are averaged directly; the continuous uniform law is
    replaced by a roots-of-unity quadrature that is exact for the grid's
    degrees.  Per-point randomization enters through exact atom moments
    raised to the cycle length.
    """
    x1, x2 = x.as_complex()
    atoms = dist.as_atoms(f.k1, f.k2)
    v = np.zeros(n + 1, dtype=np.complex128)
    if variant is Randomization.PER_CYCLE:
        for m in range(1, n + 1):
            v[m] = sum(
                p * grid_value(f.b, t * x1**m, w * x2**m) for t, w, p in atoms
            )
    else:
        k1 = np.arange(f.k1 + 1)[:, None]
        k2 = np.arange(f.k2 + 1)[None, :]
        alpha_hat = np.zeros((f.k1 + 1, f.k2 + 1), dtype=np.complex128)
        for t, w, p in atoms:
            alpha_hat += p * (t**k1) * (w**k2)
        for m in range(1, n + 1):
            v[m] = grid_value(f.b * alpha_hat**m, x1**m, x2**m)
    return v


def _signed_diag_average(
    perms: list[tuple[int, ...]], s1: int, s2: int, x: EvalPoint, n: int
) -> complex:
    """Exact average of det(I - x1 w)^s1 det(I - x2 w)^s2 over w = (diag +-1) g."""
    x1, x2 = x.as_complex()
    mats = np.zeros((len(perms), n, n))
    for p_idx, perm in enumerate(perms):
        for j in range(n):
            mats[p_idx, perm[j], j] = 1.0
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    batch = signs[:, None, :, None] * mats[None, :, :, :]
    eye = np.eye(n)
    values = np.ones(batch.shape[:2], dtype=np.complex128)
    if s1:
        values = values * np.linalg.det(eye[None, None] - complex(x1) * batch) ** s1
    if s2:
        values = values * np.linalg.det(eye[None, None] - complex(x2) * batch) ** s2
    return complex(values.mean())


def _zero_sum_restriction(perm: tuple[int, ...]) -> np.ndarray:
    """Matrix of the permutation action on the zero-sum subspace.

    Basis v_i = e_i - e_n (i < n); the image of v_i is v_{perm(i)} - v_{perm(n)}
    with v_n read as zero.
    """
    n = len(perm)
    m = np.zeros((n - 1, n - 1))
    for i in range(n - 1):
        if perm[i] != n - 1:
            m[perm[i], i] += 1.0
        if perm[n - 1] != n - 1:
            m[perm[n - 1], i] -= 1.0
    return m


def brute_force_group(
    group: GroupKind,
    spec,
    x: EvalPoint,
    n: int,
    dist: AngleDistribution | None = None,
    variant: Randomization = Randomization.PER_CYCLE,
    trials: int = 0,
    seed: int = 0,
) -> MCEstimate:
    """Literal average over every group element.

    Alternating averages use exact atom quadrature for the rotation law (so
    the result is deterministic); the Weyl variants enumerate all 2^n n! (or
    2^n n!/2) signed permutation matrices and average determinants directly.
    """
    if group is GroupKind.SYMMETRIC:
        return expect_bruteforce_sn(spec, dist or DiracOne(), variant, x, n, trials, seed)
    if group is GroupKind.ALTERNATING:
        if n > ALTERNATING_BRUTE_CAP:
            raise SizeLimitError(f"alternating brute force capped at n <= {ALTERNATING_BRUTE_CAP}")
        check_domain(spec, x)
        classes = _even_classes_by_enumeration(n)
        group_order = sum(size for _, size in classes)
        v = _atom_expected_factors(spec, dist or DiracOne(), variant, x, n)
        total = 0.0 + 0.0j
        for la, size in classes:
            prod = 1.0 + 0.0j
            for m in la.parts:
                prod *= v[m]
            total += (size / group_order) * prod
        return MCEstimate(complex(total), 0.0, group_order, seed)
    if group in (GroupKind.WEYL_SO_EVEN, GroupKind.WEYL_SO_ODD):
        if n > SIGNED_PERM_BRUTE_CAP:
            raise SizeLimitError(f"signed enumeration capped at n <= {SIGNED_PERM_BRUTE_CAP}")
        s1, s2 = spec
        perms = list(itertools.permutations(range(n)))
        if group is GroupKind.WEYL_SO_ODD:
            perms = [p for p in perms if (n - cycle_type_of(p).length) % 2 == 0]
        value = _signed_diag_average(perms, s1, s2, x, n)
        return MCEstimate(value, 0.0, len(perms) * (1 << n), seed)
    if group is GroupKind.WEYL_SU:
        if n > SU_BRUTE_CAP:
            raise SizeLimitError(f"zero-sum enumeration capped at n <= {SU_BRUTE_CAP}")
        if n < 2:
            return MCEstimate(1.0 + 0.0j, 0.0, max(1, math.factorial(n)), seed)
        s1, s2 = spec
        x1, x2 = x.as_complex()
        mats = np.stack([_zero_sum_restriction(p) for p in itertools.permutations(range(n))])
        eye = np.eye(n - 1)
        values = np.ones(mats.shape[0], dtype=np.complex128)
        if s1:
            values = values * np.linalg.det(eye[None] - complex(x1) * mats) ** s1
        if s2:
            values = values * np.linalg.det(eye[None] - complex(x2) * mats) ** s2
        return MCEstimate(complex(values.mean()), 0.0, mats.shape[0], seed)
    raise ValueError(f"unknown group kind {group}")
