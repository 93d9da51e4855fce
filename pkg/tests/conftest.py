"""Shared generators for randomized sweeps.

Tests use seeded numpy generators for instance sampling, so every sweep is
reproducible; the package's own stream type is only used where the contract
under test is about those streams.
"""

import numpy as np
import pytest

from robustkf import GaussianBelief, StateSpaceModel, build_regression


def random_spd(rng: np.random.Generator, k: int, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((k, k))
    return scale * (a @ a.T / k + 0.2 * np.eye(k))


def random_model(rng: np.random.Generator, n: int, m: int) -> StateSpaceModel:
    f = rng.standard_normal((n, n))
    radius = float(np.max(np.abs(np.linalg.eigvals(f))))
    f = 0.95 * f / max(radius, 1e-3)
    h = rng.standard_normal((m, n))
    return StateSpaceModel(
        F=f, H=h, Q=random_spd(rng, n, 0.05), R=random_spd(rng, m, 0.1)
    )


def random_regression(rng: np.random.Generator, n: int, m: int):
    model = random_model(rng, n, m)
    prior = GaussianBelief(rng.standard_normal(n), random_spd(rng, n, 0.5))
    y = model.H @ prior.mean + rng.standard_normal(m)
    return build_regression(model, prior, y)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20230815)
