"""Shared helpers: seeded random states and operators."""

from __future__ import annotations

import numpy as np
import pytest

from qfair.linalg import DensityMatrix, StateVector, haar_random_unitary


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(z / np.linalg.norm(z))


def random_density(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random mixed state (normalised Wishart)."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho))


def random_unitary(dim: int, rng: np.random.Generator):
    return haar_random_unitary(dim, rng)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)
