"""
Entrenamiento del detector basado en proyección sobre el subespacio residual.

Pipeline:
    1. Matriz de datos T_{G,s} normalizada
    2. SVD y corte en γ (estimado por salto espectral si se pide "auto")
    3. Residuos U₂ᵀ·w sobre las ventanas de entrenamiento
    4. Δ̂ y Σ̂ regularizada
    5. Umbral χ² o SVDD
"""

import logging
from typing import Literal

import numpy as np

from src.core.config import settings
from src.core.exceptions import DataError, ParameterError
from src.detect.chi2 import calibrate_chi2, chi2_quantile, inverse_sqrt
from src.detect.models import MODES, Detector, DetectorMeta, Mode
from src.detect.svdd import svdd_threshold
from src.ltisim.models import StateSpaceModel, Trajectory
from src.representations._toeplitz import markov_sequence, toeplitz
from src.representations.kernel import kernel_rep
from src.subspace.data_matrix import build_data_matrix
from src.subspace.decomposition import estimate_order, svd_split

logger = logging.getLogger(__name__)


def minimum_training_length(s: int, p: int, m: int) -> int:
    """N mínimo para que T_{G,s} tenga al menos s(p+m) columnas."""
    return s * (p + m) + s - 1


def _threshold(
    residuals: np.ndarray, mode: Mode, alpha: float, C: float, ridge: float
) -> tuple[np.ndarray, np.ndarray, float]:
    cal = calibrate_chi2(residuals, ridge)
    if mode == "chi2":
        return cal.delta_hat, cal.cov_inv_factor, chi2_quantile(alpha, residuals.shape[0])
    delta_hat, threshold, svdd = svdd_threshold(residuals, cal.cov_inv_factor, C)
    logger.info(
        "SVDD: R² = %.4g, %d vectores soporte, %d con holgura",
        threshold,
        int(np.count_nonzero(svdd.alphas > 1e-12)),
        int(np.count_nonzero(svdd.xi > 0)),
    )
    return delta_hat, cal.cov_inv_factor, threshold


def calibrated_detector(
    U2: np.ndarray,
    windows: np.ndarray,
    meta: DetectorMeta,
    mode: Mode = "chi2",
) -> Detector:
    """Calibra Δ̂, Σ̂ y el umbral para una base residual dada y ventanas nominales."""
    residuals = U2 @ windows
    delta_hat, factor, threshold = _threshold(
        residuals, mode, meta.alpha or 0.05, meta.C or 1.0, meta.ridge
    )
    return Detector(
        U2=U2, delta_hat=delta_hat, cov_inv_factor=factor, threshold=threshold, mode=mode, meta=meta
    )


def train_detector(
    traj: Trajectory,
    s: int,
    gamma: int | Literal["auto"] = "auto",
    mode: Mode = "chi2",
    alpha: float = 0.05,
    C: float = 1.0,
    ridge: float = settings.COV_RIDGE,
    n_hint: int | None = None,
) -> Detector:
    """
    Entrena el detector de proyección a partir de datos nominales.

    Args:
        traj: Trayectoria de entrenamiento (todas las etiquetas en False)
        s: Profundidad de ventana
        gamma: Dimensión del subespacio imagen o "auto" (γ = sp + n̂)
        mode: "chi2" (umbral χ²_α(θ')) o "svdd" (umbral R²)
        alpha: Nivel de significancia del modo chi2
        C: Cota de holgura del modo svdd
        ridge: Regularización relativa de Σ̂
        n_hint: Orden de respaldo si no hay salto espectral

    Returns:
        Detector inmutable

    Raises:
        DataError: Datos con falla o más cortos que s(p+m)+s−1
        ParameterError: Modo desconocido o γ fuera de rango
        ConditioningError: Σ̂ singular tras la regularización
    """
    if mode not in MODES:
        raise ParameterError(f"mode debe ser uno de {MODES}, recibido: {mode}")
    if traj.labels.any():
        raise DataError(
            f"Los datos de entrenamiento contienen {int(traj.labels.sum())} muestras con falla"
        )
    p, m = traj.p, traj.m
    needed = minimum_training_length(s, p, m)
    if traj.length < needed:
        raise DataError(
            f"Datos insuficientes: N = {traj.length} < s(p+m)+s−1 = {needed}; "
            f"aumente el horizonte de entrenamiento o reduzca s"
        )

    T = build_data_matrix(traj, s, normalize=True)
    if gamma == "auto":
        sigma = svd_split(T, 1).sigma
        n = estimate_order(sigma, s, p, m, fallback=n_hint)
        gamma = s * p + n
        logger.info("Orden estimado n = %d (γ = %d)", n, gamma)
    decomposition = svd_split(T, int(gamma))
    U2 = decomposition.U2.T

    meta = DetectorMeta(
        s=s,
        gamma=int(gamma),
        p=p,
        m=m,
        alpha=alpha if mode == "chi2" else None,
        C=C if mode == "svdd" else None,
        ridge=ridge,
        method="projection",
        training_windows=T.windows,
    )
    detector = calibrated_detector(U2, T.raw(), meta, mode)
    logger.info(
        "Detector entrenado: modo=%s s=%d γ=%d θ'=%d umbral=%.4g",
        mode, s, detector.meta.gamma, detector.theta, detector.threshold,
    )
    return detector


def innovation_toeplitz(model: StateSpaceModel, L: np.ndarray, s: int) -> np.ndarray:
    """T_{s,s} con bloques I, C A^{k−1} L: respuesta de y_s a las innovaciones r_s."""
    L = np.atleast_2d(np.asarray(L, dtype=np.float64))
    blocks = markov_sequence(np.eye(model.m), model.C, model.A, L, s)
    return toeplitz(blocks, s, s, 0)


def model_based_detector(
    model: StateSpaceModel,
    s: int,
    L: np.ndarray,
    Sigma_r: np.ndarray,
    alpha: float = 0.05,
) -> Detector:
    """
    Detector χ² con la base kernel normalizada exacta y su covarianza verdadera.

    Con innovaciones blancas r ~ N(0, Σ_r) el residuo K_{G,s,n}·w es exactamente
    K_y T_L r_s, con K_y el bloque de salida de K_{G,s,n}; por eso Δ̂ = 0.
    """
    K = kernel_rep(model, s).normalized()
    K_y = K[:, s * model.p :]
    E = innovation_toeplitz(model, L, s) @ np.kron(np.eye(s), np.linalg.cholesky(Sigma_r))
    covariance = K_y @ E @ E.T @ K_y.T
    theta = K.shape[0]
    meta = DetectorMeta(
        s=s, gamma=s * (model.p + model.m) - theta, p=model.p, m=model.m,
        alpha=alpha, ridge=0.0, method="model",
    )
    return Detector(
        U2=K,
        delta_hat=np.zeros(theta),
        cov_inv_factor=inverse_sqrt(covariance),
        threshold=chi2_quantile(alpha, theta),
        mode="chi2",
        meta=meta,
    )
