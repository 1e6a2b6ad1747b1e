import math

import numpy as np
import pytest

from conftest import all_distributions, random_eval_point, random_polynomial_grid
from perm_moments import (
    AtomMixture,
    CoeffGrid,
    DiracOne,
    DomainError,
    EvalPoint,
    GridKind,
    MomentTable,
    Partition,
    Randomization,
    RootsOfUnityConjugate,
    SizeLimitError,
    TruncationError,
    UniformConjugate,
    assoc_class_value,
    char_poly_grid,
    det_average_per_point,
    derivative_moment_fd,
    expect_bruteforce_sn,
    expect_exact,
    expect_gf,
    geometric_grid,
    gf_report,
    grid_product,
    moments_of,
    one_minus_x,
)
from perm_moments.classfun import folded_grid
from perm_moments.partitions import iter_partitions


class TestMoments:
    def test_dirac_all_ones(self):
        alpha = moments_of(DiracOne(), 3, 2).alpha
        assert np.allclose(alpha, 1.0)

    def test_uniform_pair_diagonal(self):
        alpha = moments_of(UniformConjugate(), 3, 3).alpha
        assert alpha[2, 2] == 1.0 and alpha[2, 1] == 0.0
        assert np.allclose(alpha, np.eye(4))

    def test_roots_of_unity_congruence(self):
        alpha = moments_of(RootsOfUnityConjugate(3), 4, 2).alpha
        assert alpha[4, 1] == 1.0  # 3 | (4 - 1)
        assert alpha[4, 2] == 0.0
        assert alpha[0, 0] == 1.0

    def test_atom_mixture_moments_match_sampling(self, rng):
        dist = AtomMixture(((1.0, 1.0, 0.5), (1j, -1j, 0.5)))
        alpha = moments_of(dist, 2, 2).alpha
        theta, vartheta = dist.sample(rng, 200_000)
        for k1 in range(3):
            for k2 in range(3):
                emp = np.mean(theta**k1 * vartheta**k2)
                assert abs(emp - alpha[k1, k2]) < 5e-3

    def test_normalization_always_one(self):
        for dist in all_distributions():
            assert moments_of(dist, 2, 3).alpha[0, 0] == 1.0

    def test_moment_table_validation(self):
        with pytest.raises(ValueError):
            MomentTable(np.full((2, 2), 2.0))
        bad = np.ones((2, 2), dtype=complex)
        bad[0, 0] = 0.5
        with pytest.raises(ValueError):
            MomentTable(bad)

    def test_atoms_must_sit_on_circle(self):
        with pytest.raises(DomainError):
            AtomMixture(((0.5 + 0j, 1.0 + 0j, 1.0),))


class TestGrids:
    def test_holomorphic_tail_constant_fitted(self):
        f = geometric_grid(10)
        assert f.kind is GridKind.HOLOMORPHIC
        assert f.tail_const == pytest.approx(1.0)

    def test_holomorphic_rejects_understated_tail(self):
        with pytest.raises(ValueError):
            CoeffGrid(
                np.ones((5, 1), dtype=complex),
                GridKind.HOLOMORPHIC,
                (1.0, math.inf),
                tail_const=0.5,
            )

    def test_polynomial_carries_no_radii(self):
        with pytest.raises(ValueError):
            CoeffGrid(np.ones((2, 1)), GridKind.POLYNOMIAL, (1.0, 1.0))

    def test_domain_checks(self):
        f = geometric_grid(5)
        with pytest.raises(DomainError):
            expect_gf(f, moments_of(DiracOne(), 5, 0), Randomization.PER_CYCLE, EvalPoint(1.0), 3)
        p = one_minus_x()
        with pytest.raises(DomainError):
            expect_gf(p, moments_of(DiracOne(), 1, 0), Randomization.PER_CYCLE, EvalPoint(1.2), 3)


class TestAssocClassValue:
    def test_direct_substitution(self):
        f = one_minus_x()
        val = assoc_class_value(f, Partition((2, 1)), EvalPoint(0.5))
        assert val == pytest.approx(0.375)

    def test_empty_partition(self):
        f = char_poly_grid(2, 1)
        assert assoc_class_value(f, Partition(()), EvalPoint(0.3, 0.4)) == 1.0

    def test_single_cycle_is_char_poly_factor(self):
        f = one_minus_x()
        for n in (1, 3, 6):
            x = 0.3 + 0.2j
            val = assoc_class_value(f, Partition((n,)), EvalPoint(x))
            assert val == pytest.approx(1 - x**n)

    def test_multiplicativity_per_cycle_type(self, rng):
        # product of two class functions is the class function of the product
        f1 = CoeffGrid.from_univariate(rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3))
        f2 = CoeffGrid.from_univariate(rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4))
        f12 = grid_product(f1, f2)
        for n in range(9):
            for la in iter_partitions(n):
                x = EvalPoint(0.7 * np.exp(0.9j))
                lhs = assoc_class_value(f1, la, x) * assoc_class_value(f2, la, x)
                rhs = assoc_class_value(f12, la, x)
                assert abs(lhs - rhs) < 1e-10


class TestExpectExact:
    def test_char_poly_identity(self):
        f = one_minus_x()
        alpha = moments_of(DiracOne(), 1, 0)
        for n in range(1, 13):
            for x in (0.3, 0.9, 0.3 + 0.4j):
                v = expect_exact(f, alpha, Randomization.PER_CYCLE, EvalPoint(x), n)
                assert abs(v - (1 - x)) < 1e-12

    def test_n_zero(self):
        f = char_poly_grid(1, 1)
        alpha = moments_of(UniformConjugate(), 1, 1)
        assert expect_exact(f, alpha, Randomization.PER_POINT, EvalPoint(0.2, 0.1), 0) == 1.0

    def test_square_at_two_frozen(self):
        # (1-x)^2 at n=2: (1/2)(1-x^2)^2 + (1/2)(1-x)^4 at x = 0.5
        f = CoeffGrid.from_univariate([1.0, -2.0, 1.0])
        alpha = moments_of(DiracOne(), 2, 0)
        v = expect_exact(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.5), 2)
        assert v == pytest.approx(0.3125)

    def test_cap(self):
        f = one_minus_x()
        alpha = moments_of(DiracOne(), 1, 0)
        with pytest.raises(SizeLimitError):
            expect_exact(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.5), 61)


class TestExpectGf:
    def test_char_poly_identity_any_n(self):
        f = one_minus_x()
        alpha = moments_of(DiracOne(), 1, 0)
        for n in (1, 7, 50, 200):
            v = expect_gf(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.3), n)
            assert abs(v - 0.7) < 1e-12

    def test_uniform_pair_unit_circle_coefficients(self):
        # moments of |char poly|^2 on the unit circle: coefficient n is n + 1
        f = char_poly_grid(1, 1)
        alpha = moments_of(UniformConjugate(), 1, 1)
        x1 = np.exp(0.7j)
        for n in range(1, 11):
            for variant in Randomization:
                v = expect_gf(f, alpha, variant, EvalPoint(x1, np.conj(x1)), n)
                assert abs(v - (n + 1)) < 1e-9

    def test_matches_exact_for_truncated_geometric(self):
        f = geometric_grid(40)
        alpha = moments_of(DiracOne(), 40, 0)
        rep = gf_report(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.5), 10)
        exact = expect_exact(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.5), 10)
        assert abs(rep.value - exact) <= max(rep.trunc_bound, 1e-12)

    def test_truncation_bound_is_honest(self):
        # compare against a much deeper truncation as the reference value
        shallow = geometric_grid(25)
        deep = geometric_grid(300)
        x = EvalPoint(0.6)
        for n in (5, 12, 20):
            rep = gf_report(
                shallow, moments_of(DiracOne(), 25, 0), Randomization.PER_CYCLE, x, n
            )
            ref = expect_gf(
                deep, moments_of(DiracOne(), 300, 0), Randomization.PER_CYCLE, x, n
            )
            assert abs(rep.value - ref) <= rep.trunc_bound
            assert rep.trunc_bound < 1e-3

    def test_truncation_tolerance_enforced(self):
        f = geometric_grid(6)
        alpha = moments_of(DiracOne(), 6, 0)
        with pytest.raises(TruncationError):
            expect_gf(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.9), 12, tol=1e-12)

    def test_cross_route_identity_random_grids(self, rng):
        worst = 0.0
        for _ in range(12):
            f = random_polynomial_grid(rng, int(rng.integers(1, 5)), int(rng.integers(0, 5)))
            x = EvalPoint(*random_eval_point(rng))
            n = int(rng.integers(1, 13))
            for dist in all_distributions():
                alpha = moments_of(dist, f.k1, f.k2)
                for variant in Randomization:
                    a = expect_exact(f, alpha, variant, x, n)
                    g = expect_gf(f, alpha, variant, x, n)
                    worst = max(worst, abs(a - g))
        assert worst < 1e-10

    def test_order_below_n_rejected(self):
        f = one_minus_x()
        alpha = moments_of(DiracOne(), 1, 0)
        with pytest.raises(ValueError):
            expect_gf(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.3), 5, order=3)


class TestBruteForce:
    def test_dirac_exact_char_poly(self):
        f = one_minus_x()
        for n in range(1, 8):
            est = expect_bruteforce_sn(
                f, DiracOne(), Randomization.PER_CYCLE, EvalPoint(0.6), n
            )
            assert est.stderr == 0.0
            assert abs(est.value - 0.4) < 1e-12

    def test_n_equals_one_is_atom_average(self):
        dist = RootsOfUnityConjugate(2)
        f = char_poly_grid(1, 1)
        x = EvalPoint(0.5, 0.25)
        est = expect_bruteforce_sn(f, dist, Randomization.PER_CYCLE, x, 1, trials=50_000, seed=3)
        expected = 0.5 * ((1 - 0.5) * (1 - 0.25) + (1 + 0.5) * (1 + 0.25))
        assert abs(est.value - expected) < 3 * est.stderr + 1e-12

    def test_uniform_pair_matches_coefficient(self):
        f = char_poly_grid(1, 1)
        x1 = np.exp(-0.8j)
        est = expect_bruteforce_sn(
            f,
            UniformConjugate(),
            Randomization.PER_CYCLE,
            EvalPoint(x1, np.conj(x1)),
            3,
            trials=100_000,
            seed=5,
        )
        assert abs(est.value - 4.0) < 3 * est.stderr

    def test_per_point_matches_gf(self, rng):
        f = random_polynomial_grid(rng, 2, 0)
        dist = RootsOfUnityConjugate(2)
        alpha = moments_of(dist, 2, 0)
        x = EvalPoint(0.4)
        est = expect_bruteforce_sn(
            f, dist, Randomization.PER_POINT, x, 5, trials=200_000, seed=6
        )
        truth = expect_gf(f, alpha, Randomization.PER_POINT, x, 5)
        assert abs(est.value - truth) < 3 * est.stderr

    def test_cap(self):
        f = one_minus_x()
        with pytest.raises(SizeLimitError):
            expect_bruteforce_sn(f, DiracOne(), Randomization.PER_CYCLE, EvalPoint(0.5), 9)

    def test_same_seed_identical(self):
        f = char_poly_grid(1, 0)
        a = expect_bruteforce_sn(
            f, UniformConjugate(), Randomization.PER_CYCLE, EvalPoint(0.5), 4, 10_000, seed=1
        )
        b = expect_bruteforce_sn(
            f, UniformConjugate(), Randomization.PER_CYCLE, EvalPoint(0.5), 4, 10_000, seed=1
        )
        assert a == b


class TestMatrixOracle:
    def test_dirac_is_char_poly_mean(self):
        est = det_average_per_point(0.5, DiracOne(), 3, trials=1)
        assert abs(est.value - 0.5) < 1e-12

    def test_x_zero_gives_one(self):
        est = det_average_per_point(0.0, UniformConjugate(), 3, trials=50, seed=2)
        assert abs(est.value - 1.0) < 1e-14

    def test_pm_one_diagonal_matches_gf(self):
        dist = RootsOfUnityConjugate(2)
        f = one_minus_x()
        alpha = moments_of(dist, 1, 0)
        truth = expect_gf(f, alpha, Randomization.PER_POINT, EvalPoint(0.4), 4)
        est = det_average_per_point(0.4, dist, 4, trials=20_000, seed=4)
        assert abs(est.value - truth) < 3 * est.stderr


class TestDerivativeMoment:
    def test_matches_analytic_derivative_for_char_poly(self):
        # E = 1 - x1 for all n, so the derivative in x1 is -1
        f = one_minus_x()
        alpha = moments_of(DiracOne(), 1, 0)
        d = derivative_moment_fd(f, alpha, Randomization.PER_CYCLE, EvalPoint(0.4), 9)
        assert d == pytest.approx(-1.0, abs=1e-8)


def test_folded_grid_keeps_envelope():
    f = geometric_grid(12)
    alpha = moments_of(RootsOfUnityConjugate(2), 12, 0)
    folded = folded_grid(f, alpha)
    assert folded.kind is GridKind.HOLOMORPHIC
    assert folded.tail_const == f.tail_const
    assert folded.b[1, 0] == 0.0  # odd powers killed by the +-1 law
