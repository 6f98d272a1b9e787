"""Fixtures compartidas: modelos sembrados y trayectorias de entrenamiento."""

import numpy as np
import pytest

from src.ltisim.models import NoiseModel, StateSpaceModel
from src.ltisim.random_models import random_minimal_model
from src.ltisim.simulator import gaussian_input, simulate


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def scalar_model():
    """A=0.5, B=1, C=1, D=0."""
    return StateSpaceModel([[0.5]], [[1.0]], [[1.0]])


@pytest.fixture
def chain_model():
    """Cadena observable de orden 3 con una sola salida (μ_obs = 3)."""
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.1, -0.2, 0.5]])
    B = np.array([[0.0], [0.0], [1.0]])
    C = np.array([[1.0, 0.0, 0.0]])
    return StateSpaceModel(A, B, C)


@pytest.fixture
def random_model():
    """Modelo mínimo estable n=3, p=1, m=2."""
    return random_minimal_model(np.random.default_rng(7), n=3, p=1, m=2)


@pytest.fixture
def mimo_model():
    """Modelo mínimo estable n=2, p=2, m=2."""
    return random_minimal_model(np.random.default_rng(11), n=2, p=2, m=2)


@pytest.fixture
def noise_model(random_model):
    return NoiseModel.isotropic(random_model.n, random_model.m, 0.1, 0.1)


@pytest.fixture
def clean_trajectory(random_model):
    u = gaussian_input(300, random_model.p, seed=3)
    x0 = np.random.default_rng(5).standard_normal(random_model.n)
    return simulate(random_model, u, x0=x0)


@pytest.fixture
def noisy_trajectory(random_model, noise_model):
    u = gaussian_input(2000, random_model.p, seed=3)
    return simulate(random_model, u, noise=noise_model, seed=4)
