"""
SVDD con kernel lineal resuelto por descomposición (SMO de pares).

Dual en forma de minimización:
    min f(α) = αᵀKα − Σ α_i K_ii   s.a.  Σ α_i = 1,  0 ≤ α_i ≤ C
con gradiente G = 2Kα − diag(K). Cada paso mueve masa entre el par que más
viola las condiciones KKT.
"""

import logging

import numpy as np

from src.core.config import settings
from src.core.exceptions import ConvergenceError, DataError, ParameterError
from src.detect.models import SvddModel

logger = logging.getLogger(__name__)

_TINY = 1e-12
_TAU = 1e-12


def _select_working_set(alpha: np.ndarray, G: np.ndarray, C: float) -> tuple[int, int] | None:
    """Par de máxima violación: i sube (α_i < C), j baja (α_j > 0)."""
    up = np.flatnonzero(alpha < C - _TINY)
    down = np.flatnonzero(alpha > _TINY)
    if up.size == 0 or down.size == 0:
        return None
    i = up[np.argmin(G[up])]
    j = down[np.argmax(G[down])]
    return int(i), int(j)


def _radius_sq(alpha: np.ndarray, d2: np.ndarray, C: float) -> float:
    free = (alpha > _TINY) & (alpha < C - _TINY)
    if free.any():
        return float(d2[free].mean())
    # sin vectores libres R² queda acotado por ambos lados
    bounds = []
    below = d2[alpha < C - _TINY]
    above = d2[alpha > _TINY]
    if below.size:
        bounds.append(below.max())
    if above.size:
        bounds.append(above.min())
    return float(max(0.0, np.mean(bounds)))


def svdd_fit(
    points: np.ndarray,
    C: float,
    tol: float = settings.SVDD_TOL,
    max_updates: int = settings.SVDD_MAX_UPDATES,
) -> SvddModel:
    """
    Ajusta la bola mínima con holgura sobre puntos ya blanqueados.

    Args:
        points: Matriz (K, θ'), un punto por fila
        C: Cota de la caja; debe ser >= 1/K
        tol: Tolerancia KKT relativa a max(1, max ‖x_i‖²)
        max_updates: Máximo de actualizaciones de pares (pasos SMO)

    Returns:
        SvddModel con centro, R², duales y holguras

    Raises:
        ParameterError: Si C < 1/K
        ConvergenceError: Si no converge en max_updates actualizaciones

    Example:
        >>> model = svdd_fit(np.array([[0.0, 0.0], [2.0, 0.0]]), C=1.0)
        >>> model.center, model.radius_sq
        (array([1., 0.]), 1.0)
    """
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    count = X.shape[0]
    if count < 1:
        raise DataError("svdd_fit requiere al menos un punto")
    if C < 1.0 / count - _TINY:
        raise ParameterError(f"C debe ser >= 1/K = {1.0 / count:.6g}, recibido: {C}")
    box = min(C, 1.0)

    K = X @ X.T
    diag = np.diag(K).copy()
    scale = max(1.0, float(diag.max()))
    alpha = np.full(count, 1.0 / count)
    G = 2.0 * K @ alpha - diag

    updates = 0
    while True:
        pair = _select_working_set(alpha, G, box)
        if pair is None:
            break
        i, j = pair
        violation = G[j] - G[i]
        if violation < tol * scale:
            break
        if updates == max_updates:
            raise ConvergenceError(f"SVDD no convergió en {max_updates} actualizaciones")
        a = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if a <= _TAU:
            a = _TAU
        delta = min(violation / (2.0 * a), box - alpha[i], alpha[j])
        alpha[i] += delta
        alpha[j] -= delta
        G += 2.0 * delta * (K[:, i] - K[:, j])
        updates += 1
    logger.debug("SVDD convergió en %d actualizaciones", updates)

    center = alpha @ X
    d2 = np.sum((X - center) ** 2, axis=1)
    R2 = _radius_sq(alpha, d2, box)
    return SvddModel(
        center=center,
        radius_sq=R2,
        alphas=alpha,
        xi=np.clip(d2 - R2, 0.0, None),
        distances_sq=d2,
        C=box,
    )


def svdd_threshold(
    residuals: np.ndarray, cov_inv_factor: np.ndarray, C: float
) -> tuple[np.ndarray, float, SvddModel]:
    """
    Blanquea los residuos, ajusta SVDD y retorna (Δ̂, umbral, modelo).

    Δ̂ es el centro llevado de vuelta a coordenadas de residuo; el umbral es R²,
    comparado contra el estadístico de Mahalanobis al cuadrado.
    """
    residuals = np.atleast_2d(np.asarray(residuals, dtype=np.float64))
    whitened = (cov_inv_factor @ residuals).T
    model = svdd_fit(whitened, C)
    delta_hat = np.linalg.solve(cov_inv_factor, model.center)
    return delta_hat, model.radius_sq, model
