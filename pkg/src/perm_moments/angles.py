"""Joint distributions of the randomizing rotation pair (theta, vartheta) on the circle.

Each distribution is declared once and exposes both faces that the rest of
the package needs: the exact joint moment table alpha[k1, k2] = E[theta^k1
vartheta^k2] (the only trace the distribution leaves in expectation
formulas) and a sampler for the Monte Carlo routes.  Deriving both from one
declaration is what keeps formula and simulation from drifting apart.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError

UNIT_CIRCLE_TOL = 1e-12

Atom = tuple[complex, complex, float]


@dataclass(frozen=True)
class MomentTable:
    """alpha[k1, k2] = E[theta^k1 vartheta^k2] for 0 <= k_i <= K_i."""

    alpha: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.alpha, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError("moment table must be 2-D")
        if abs(arr[0, 0] - 1.0) > 1e-9:
            raise ValueError("alpha[0, 0] must be 1")
        if np.max(np.abs(arr)) > 1.0 + 1e-9:
            raise ValueError("circle-valued moments cannot exceed 1 in modulus")
        object.__setattr__(self, "alpha", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.alpha.shape


@dataclass(frozen=True)
class DiracOne:
    """theta = vartheta = 1 almost surely; every moment is 1 (no randomization)."""

    def moments(self, k1: int, k2: int) -> MomentTable:
        return MomentTable(np.ones((k1 + 1, k2 + 1), dtype=np.complex128))

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        ones = np.ones(size, dtype=np.complex128)
        return ones, ones.copy()

    def as_atoms(self, k1: int, k2: int) -> list[Atom]:
        return [(1.0 + 0.0j, 1.0 + 0.0j, 1.0)]


@dataclass(frozen=True)
class UniformConjugate:
    """theta uniform on the circle, vartheta = conj(theta).

    alpha[k1, k2] = 1 if k1 == k2 else 0.
    """

    def moments(self, k1: int, k2: int) -> MomentTable:
        alpha = np.zeros((k1 + 1, k2 + 1), dtype=np.complex128)
        for k in range(min(k1, k2) + 1):
            alpha[k, k] = 1.0
        return MomentTable(alpha)

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        theta = np.exp(2j * np.pi * rng.random(size))
        return theta, np.conj(theta)

    def as_atoms(self, k1: int, k2: int) -> list[Atom]:
        # Averaging over p-th roots of unity is exact for trigonometric
        # polynomials of frequency range [-k2, k1] once p > k1 + k2.
        p = k1 + k2 + 1
        return RootsOfUnityConjugate(p).as_atoms(k1, k2)


@dataclass(frozen=True)
class RootsOfUnityConjugate:
    """theta uniform on the p-th roots of unity, vartheta = conj(theta).

    alpha[k1, k2] = 1 if p divides (k1 - k2) else 0.
    """

    p: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("p must be a positive integer")

    def moments(self, k1: int, k2: int) -> MomentTable:
        alpha = np.zeros((k1 + 1, k2 + 1), dtype=np.complex128)
        for a in range(k1 + 1):
            for b in range(k2 + 1):
                if (a - b) % self.p == 0:
                    alpha[a, b] = 1.0
        return MomentTable(alpha)

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        k = rng.integers(0, self.p, size)
        theta = np.exp(2j * np.pi * k / self.p)
        return theta, np.conj(theta)

    def as_atoms(self, k1: int, k2: int) -> list[Atom]:
        return [
            (cmath.exp(2j * cmath.pi * m / self.p), cmath.exp(-2j * cmath.pi * m / self.p), 1.0 / self.p)
            for m in range(self.p)
        ]


@dataclass(frozen=True)
class AtomMixture:
    """Finitely supported joint law: atoms (theta, vartheta, prob) on the unit circle."""

    atoms: tuple[Atom, ...]

    def __post_init__(self) -> None:
        atoms = tuple((complex(t), complex(v), float(p)) for t, v, p in self.atoms)
        if not atoms:
            raise ValueError("need at least one atom")
        if abs(sum(p for _, _, p in atoms) - 1.0) > 1e-9:
            raise ValueError("atom probabilities must sum to 1")
        for t, v, p in atoms:
            if p < 0:
                raise ValueError("atom probabilities must be non-negative")
            if abs(abs(t) - 1.0) > UNIT_CIRCLE_TOL or abs(abs(v) - 1.0) > UNIT_CIRCLE_TOL:
                raise DomainError(f"atom ({t}, {v}) is not on the unit circle")
        object.__setattr__(self, "atoms", atoms)

    def moments(self, k1: int, k2: int) -> MomentTable:
        alpha = np.zeros((k1 + 1, k2 + 1), dtype=np.complex128)
        for t, v, p in self.atoms:
            pow1 = t ** np.arange(k1 + 1)
            pow2 = v ** np.arange(k2 + 1)
            alpha += p * np.outer(pow1, pow2)
        return MomentTable(alpha)

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        probs = np.array([p for _, _, p in self.atoms])
        probs = probs / probs.sum()
        idx = rng.choice(len(self.atoms), size=size, p=probs)
        thetas = np.array([t for t, _, _ in self.atoms])
        varthetas = np.array([v for _, v, _ in self.atoms])
        return thetas[idx], varthetas[idx]

    def as_atoms(self, k1: int, k2: int) -> list[Atom]:
        return list(self.atoms)


AngleDistribution = Union[DiracOne, UniformConjugate, RootsOfUnityConjugate, AtomMixture]


def moments_of(dist: AngleDistribution, k1: int, k2: int) -> MomentTable:
    """Exact joint moment table of a declared distribution, up to orders (k1, k2)."""
    return dist.moments(k1, k2)
