"""Named invariant suites behind ``perm-moments verify``.

Each suite returns (check name, passed, detail) triples.  Checks are sized to
run in seconds; the pytest suite carries the heavyweight versions.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .angles import DiracOne, RootsOfUnityConjugate, UniformConjugate, moments_of
from .asymptotics import (
    asymptotic_expect,
    binomial_growth_ratio,
    complex_binomial,
    complex_gamma,
)
from .classfun import CoeffGrid, EvalPoint, Randomization, expect_exact, expect_gf
from .feller import coupling_stats, empirical_cycle_type_law, mc_expect_per_cycle
from .groups import GroupKind, brute_force_group, expect_an_exact, expect_group_gf
from .partitions import (
    centralizer_order,
    class_weight,
    conjugacy_classes_by_enumeration,
    iter_partitions,
)
from .rng import substream
from .series import binomial_factor, coefficient

Check = tuple[str, bool, str]


def _random_grid(rng: np.random.Generator, k1: int, k2: int, b00=None) -> CoeffGrid:
    b = (rng.uniform(-1, 1, (k1 + 1, k2 + 1)) + 1j * rng.uniform(-1, 1, (k1 + 1, k2 + 1)))
    if b00 is not None:
        b[0, 0] = b00
    return CoeffGrid(b)


def suite_class_equation(seed: int = 0) -> list[Check]:
    checks: list[Check] = []
    worst_n = None
    for n in range(13):
        total = sum((class_weight(la) for la in iter_partitions(n)), Fraction(0))
        if total != 1:
            worst_n = n
    checks.append(
        ("class-weights-sum-to-one", worst_n is None, f"n <= 12, exact rationals")
    )
    ok = True
    for n in range(1, 7):
        order = 1
        for k in range(2, n + 1):
            order *= k
        for la, size in conjugacy_classes_by_enumeration(n):
            if size * centralizer_order(la) != order:
                ok = False
    checks.append(("class-sizes-match-enumeration", ok, "n <= 6, literal bucketing"))
    return checks


def suite_gf_vs_exact(seed: int = 0) -> list[Check]:
    rng = substream(seed, 100)
    dists = [DiracOne(), UniformConjugate(), RootsOfUnityConjugate(3)]
    worst = 0.0
    for _ in range(6):
        f = _random_grid(rng, 3, 2)
        x = EvalPoint(0.8 * rng.random() * np.exp(2j * np.pi * rng.random()),
                      0.8 * rng.random() * np.exp(2j * np.pi * rng.random()))
        for dist in dists:
            alpha = moments_of(dist, f.k1, f.k2)
            for variant in Randomization:
                n = int(rng.integers(1, 10))
                a = expect_exact(f, alpha, variant, x, n)
                g = expect_gf(f, alpha, variant, x, n)
                worst = max(worst, abs(a - g))
    return [("partition-sum-equals-coefficient", bool(worst < 1e-9), f"worst |diff| = {worst:.2e}")]


def suite_feller(seed: int = 0) -> list[Check]:
    checks: list[Check] = []
    f = CoeffGrid.from_univariate([1.0, -1.0])
    a = mc_expect_per_cycle(f, 0.3, 12, 20_000, seed=seed + 1)
    b = mc_expect_per_cycle(f, 0.3, 12, 20_000, seed=seed + 1)
    checks.append(("same-seed-reproduces", a == b, "bit-identical estimates"))
    err = abs(a.value - 0.7)
    checks.append(
        ("horizon-mean-matches-exact", bool(err <= 3 * a.stderr + 1e-12),
         f"|est - 0.7| = {err:.2e}, 3se = {3 * a.stderr:.2e}")
    )
    law = empirical_cycle_type_law(6, 200_000, seed + 2)
    tv = 0.5 * sum(
        abs(law.get(la, 0.0) - 1.0 / centralizer_order(la)) for la in iter_partitions(6)
    )
    checks.append(("cycle-type-law", bool(tv < 2e-2), f"TV distance at n=6: {tv:.4f}"))
    stats = coupling_stats(20, 3, 20_000, seed + 3)
    bound_ok = bool(
        np.all(stats.mean_abs_diff <= stats.theoretical_bound + 3 * stats.stderr_abs_diff)
    )
    checks.append(
        ("coupling-bound", bound_ok,
         f"max E|C-Y| = {float(stats.mean_abs_diff.max()):.4f}, bound = {stats.theoretical_bound:.4f}")
    )
    return checks


def suite_asymptotics(seed: int = 0) -> list[Check]:
    checks: list[Check] = []
    rng = substream(seed, 200)
    worst = 0.0
    for _ in range(20):
        z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(z - round(z.real)) < 0.1 and z.real < 1:
            continue
        lhs = complex_gamma(z + 1)
        rhs = z * complex_gamma(z)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    checks.append(("gamma-recurrence", bool(worst < 1e-11), f"worst rel err = {worst:.2e}"))
    worst = 0.0
    for _ in range(5):
        s = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        h = binomial_factor(1.0, s, 30)
        for k in (5, 17, 30):
            direct = complex_binomial(s - 1 + k, k)
            worst = max(worst, abs(coefficient(h, k) - direct) / max(1.0, abs(direct)))
    checks.append(("newton-series", bool(worst < 1e-10), f"worst rel err = {worst:.2e}"))
    f = _random_grid(rng, 2, 2, b00=2.0)
    alpha = moments_of(DiracOne(), 2, 2)
    x = EvalPoint(0.3, 0.2)
    errs = []
    for n in (50, 200):
        ratio = expect_gf(f, alpha, Randomization.PER_CYCLE, x, n) / asymptotic_expect(
            f, alpha, Randomization.PER_CYCLE, x, n
        ).leading
        errs.append(abs(ratio - 1))
    checks.append(
        ("ratio-contracts", bool(errs[1] < errs[0]), f"|ratio-1| {errs[0]:.3e} -> {errs[1]:.3e}")
    )
    growth = abs(binomial_growth_ratio(0.5 + 0.3j, 1000) - 1)
    checks.append(("binomial-growth", bool(growth < 5e-3), f"|ratio-1| at n=1000: {growth:.2e}"))
    return checks


def suite_groups(seed: int = 0) -> list[Check]:
    checks: list[Check] = []
    rng = substream(seed, 300)
    worst = 0.0
    for _ in range(4):
        f = _random_grid(rng, 2, 1)
        x = EvalPoint(0.5 * rng.random(), 0.5 * rng.random())
        alpha = moments_of(DiracOne(), f.k1, f.k2)
        for n in range(2, 7):
            a = expect_an_exact(f, alpha, Randomization.PER_CYCLE, x, n)
            g = expect_group_gf(GroupKind.ALTERNATING, f, alpha, Randomization.PER_CYCLE, x, n)
            bf = brute_force_group(GroupKind.ALTERNATING, f, x, n, DiracOne()).value
            worst = max(worst, abs(a - g), abs(a - bf))
    checks.append(("alternating-three-routes", bool(worst < 1e-9), f"worst |diff| = {worst:.2e}"))
    worst = 0.0
    for group in (GroupKind.WEYL_SO_EVEN, GroupKind.WEYL_SO_ODD):
        for n in (2, 3):
            x = EvalPoint(0.4, 0.3)
            formula = expect_group_gf(group, (1, 1), None, Randomization.PER_POINT, x, n)
            brute = brute_force_group(group, (1, 1), x, n).value
            worst = max(worst, abs(formula - brute))
    checks.append(("weyl-so-vs-enumeration", bool(worst < 1e-9), f"worst |diff| = {worst:.2e}"))
    worst = 0.0
    for n in (2, 3, 4):
        x = EvalPoint(0.3, 0.0)
        formula = expect_group_gf(GroupKind.WEYL_SU, (1, 0), None, Randomization.PER_CYCLE, x, n)
        brute = brute_force_group(GroupKind.WEYL_SU, (1, 0), x, n).value
        worst = max(worst, abs(formula - brute))
    checks.append(("weyl-su-vs-zero-sum-action", bool(worst < 1e-9), f"worst |diff| = {worst:.2e}"))
    return checks
