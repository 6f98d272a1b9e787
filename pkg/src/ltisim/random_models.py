"""Generación de modelos mínimos aleatorios bien condicionados."""

import logging

import numpy as np
from scipy import linalg

from src.core.exceptions import ModelError
from src.ltisim.models import StateSpaceModel
from src.ltisim.structure import controllability_matrix, observability_matrix

logger = logging.getLogger(__name__)


def _conditioning(M: np.ndarray) -> float:
    sigma = linalg.svdvals(M)
    return float(sigma[-1] / sigma[0]) if sigma[0] > 0 else 0.0


def random_minimal_model(
    rng: np.random.Generator,
    n: int,
    p: int,
    m: int,
    radius: float = 0.9,
    min_conditioning: float = 1e-4,
    max_tries: int = 200,
) -> StateSpaceModel:
    """
    Sortea un modelo estable y mínimo con C_n y O_n bien condicionados.

    A se escala para que su radio espectral caiga en [0.3, radius]; B, C, D son normales.

    Raises:
        ModelError: Si no se encuentra un modelo aceptable en max_tries sorteos
    """
    for _ in range(max_tries):
        A = rng.standard_normal((n, n))
        rho = float(np.max(np.abs(linalg.eigvals(A))))
        target = rng.uniform(0.3, radius)
        A = A * (target / rho) if rho > 0 else A
        B = rng.standard_normal((n, p))
        C = rng.standard_normal((m, n))
        D = rng.standard_normal((m, p))
        candidate = StateSpaceModel(A, B, C, D, validate=False)
        ctrb = controllability_matrix(candidate, n)
        obsv = observability_matrix(candidate, n)
        if min(_conditioning(ctrb), _conditioning(obsv)) >= min_conditioning:
            return StateSpaceModel(A, B, C, D)
    raise ModelError(f"No se encontró un modelo mínimo bien condicionado en {max_tries} sorteos")
