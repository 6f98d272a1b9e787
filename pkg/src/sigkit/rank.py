"""Rango numérico y persistencia de excitación."""

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import DimensionError, ParameterError
from src.sigkit.hankel import build_hankel
from src.sigkit.models import SignalSequence


def numerical_rank(mtx: np.ndarray, rel_tol: float = settings.RANK_REL_TOL) -> int:
    """
    Cuenta los valores singulares σ_i > rel_tol·σ_max·max(filas, columnas).

    Args:
        mtx: Matriz real
        rel_tol: Tolerancia relativa (> 0)

    Returns:
        Rango numérico; 0 para la matriz nula

    Raises:
        DimensionError: Si la matriz está vacía
        ParameterError: Si rel_tol <= 0
    """
    if rel_tol <= 0:
        raise ParameterError(f"rel_tol debe ser > 0, recibido: {rel_tol}")
    mtx = np.atleast_2d(np.asarray(mtx, dtype=np.float64))
    if mtx.size == 0:
        raise DimensionError(f"Matriz vacía de forma {mtx.shape}")
    sigma = linalg.svdvals(mtx)
    if sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rel_tol * sigma[0] * max(mtx.shape)))


def persistence_order(
    u: SignalSequence, order: int, rel_tol: float = settings.RANK_REL_TOL
) -> bool:
    """True si u es persistentemente excitante de orden `order` (H_order(u) de rango completo)."""
    if u.length < order:
        raise DimensionError(f"N ({u.length}) debe ser >= order ({order})")
    hankel = build_hankel(u, order)
    return numerical_rank(hankel.data, rel_tol) == order * u.dim
