import numpy as np
import pytest

from perm_moments import (
    AtomMixture,
    CoeffGrid,
    DiracOne,
    RootsOfUnityConjugate,
    UniformConjugate,
)


def random_polynomial_grid(rng, k1, k2, scale=2.0, b00=None) -> CoeffGrid:
    b = scale * (rng.uniform(-1, 1, (k1 + 1, k2 + 1)) + 1j * rng.uniform(-1, 1, (k1 + 1, k2 + 1)))
    if b00 is not None:
        b[0, 0] = b00
    return CoeffGrid(b)


def random_eval_point(rng, radius=0.9):
    def draw():
        return radius * rng.random() * np.exp(2j * np.pi * rng.random())

    return draw(), draw()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def all_distributions():
    return [
        DiracOne(),
        UniformConjugate(),
        RootsOfUnityConjugate(3),
        AtomMixture(
            (
                (1.0 + 0.0j, 1.0 + 0.0j, 0.25),
                (1j, -1j, 0.25),
                (np.exp(0.4j), np.exp(-1.1j), 0.5),
            )
        ),
    ]
