"""
Umbral χ², calibración de covarianza y estadístico de Mahalanobis.
"""

from typing import NamedTuple

import numpy as np
from scipy import linalg, special

from src.core.config import settings
from src.core.exceptions import ConditioningError, DataError, ModeError, ParameterError
from src.detect.models import Detector, EvaluationResult


class Chi2Calibration(NamedTuple):
    delta_hat: np.ndarray
    covariance: np.ndarray
    cov_inv_factor: np.ndarray


def chi2_quantile(alpha: float, dof: int) -> float:
    """
    Cuantil superior q con P(χ²_dof > q) = alpha.

    Se obtiene invirtiendo la gamma incompleta regularizada superior:
    q = 2·Q⁻¹(dof/2, alpha).

    Raises:
        ParameterError: Si alpha no está en (0, 1) o dof < 1

    Example:
        >>> round(chi2_quantile(0.05, 2), 5)
        5.99146
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha debe estar en (0, 1), recibido: {alpha}")
    if int(dof) != dof or dof < 1:
        raise ParameterError(f"dof debe ser un entero >= 1, recibido: {dof}")
    return float(2.0 * special.gammainccinv(dof / 2.0, alpha))


def inverse_sqrt(covariance: np.ndarray) -> np.ndarray:
    """Σ^{−1/2} simétrica por descomposición espectral."""
    cov = 0.5 * (covariance + covariance.T)
    eigvals, eigvecs = linalg.eigh(cov)
    scale = max(abs(eigvals[-1]), 1e-300)
    if eigvals[0] <= np.finfo(float).eps * scale * cov.shape[0]:
        raise ConditioningError(
            f"Covarianza singular tras la regularización: λ_min={eigvals[0]:.3e}; "
            f"aumente ridge o la cantidad de datos de entrenamiento"
        )
    return (eigvecs / np.sqrt(eigvals)) @ eigvecs.T


def calibrate_chi2(residuals: np.ndarray, ridge: float = settings.COV_RIDGE) -> Chi2Calibration:
    """
    Estima Δ̂ (media por filas) y Σ̂ = Gram centrada/(K−1) + ridge·(traza/θ')·I.

    Args:
        residuals: θ' × K, un residuo por columna
        ridge: Regularización relativa (>= 0)

    Raises:
        DataError: Si no hay residuos
        ConditioningError: Si Σ̂ no es definida positiva
    """
    residuals = np.atleast_2d(np.asarray(residuals, dtype=np.float64))
    if residuals.shape[1] < 1:
        raise DataError("Se requiere al menos un residuo de entrenamiento")
    if ridge < 0:
        raise ParameterError(f"ridge debe ser >= 0, recibido: {ridge}")
    theta, count = residuals.shape
    delta_hat = residuals.mean(axis=1)
    centered = residuals - delta_hat[:, None]
    cov = centered @ centered.T / max(count - 1, 1)
    trace = float(np.trace(cov))
    cov = cov + ridge * (trace / theta if trace > 0 else 1.0) * np.eye(theta)
    return Chi2Calibration(delta_hat=delta_hat, covariance=cov, cov_inv_factor=inverse_sqrt(cov))


def mahalanobis(residuals: np.ndarray, delta_hat: np.ndarray, factor: np.ndarray) -> np.ndarray:
    """J = ‖W(r − Δ̂)‖² por columna."""
    residuals = np.asarray(residuals, dtype=np.float64)
    z = factor @ (residuals.reshape(residuals.shape[0], -1) - delta_hat[:, None])
    return np.einsum("ij,ij->j", z, z)


def batch_statistic(det: Detector, windows: np.ndarray) -> np.ndarray:
    """Estadístico de cada ventana (columnas); el mismo cálculo en ambos modos."""
    return mahalanobis(det.residual(windows), det.delta_hat, det.cov_inv_factor)


def _evaluate_one(det: Detector, window: np.ndarray, k: int) -> EvaluationResult:
    J = float(batch_statistic(det, np.asarray(window, dtype=np.float64).reshape(-1, 1))[0])
    return EvaluationResult(k=k, J=J, alarm=J > det.threshold)


def chi2_statistic(det: Detector, window: np.ndarray, k: int = 0) -> EvaluationResult:
    """
    J = (r−Δ̂)ᵀΣ̂⁻¹(r−Δ̂) con r = U2·w.

    Raises:
        ModeError: Si el detector no está en modo chi2
    """
    if det.mode != "chi2":
        raise ModeError(f"chi2_statistic requiere modo 'chi2', el detector está en '{det.mode}'")
    return _evaluate_one(det, window, k)


def svdd_statistic(det: Detector, window: np.ndarray, k: int = 0) -> EvaluationResult:
    """Distancia² blanqueada al centro SVDD; alarma si supera R²."""
    if det.mode != "svdd":
        raise ModeError(f"svdd_statistic requiere modo 'svdd', el detector está en '{det.mode}'")
    return _evaluate_one(det, window, k)


def evaluate(det: Detector, window: np.ndarray, k: int = 0) -> EvaluationResult:
    """Despacha según el modo del detector."""
    return _evaluate_one(det, window, k)
