"""
Síntesis de ganancias: deadbeat, observadores y ganancia de Kalman en estado estacionario.
"""

import logging
from typing import NamedTuple

import control
import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import (
    ConvergenceError,
    ModelError,
    ParameterError,
    SynthesisError,
)
from src.ltisim.models import GainPair, NoiseModel, StateSpaceModel
from src.ltisim.structure import matrix_powers, spectral_radius
from src.sigkit.rank import numerical_rank

logger = logging.getLogger(__name__)


class KalmanGain(NamedTuple):
    """Solución estacionaria del predictor de Kalman."""
    L: np.ndarray
    Sigma_r: np.ndarray
    P: np.ndarray


def _ctrb(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.hstack([Ak @ B for Ak in matrix_powers(A, A.shape[0] - 1)])


def _nilpotent(M: np.ndarray, A: np.ndarray, tol: float) -> bool:
    """Certificado ‖Mⁿ‖₂ ≤ tol·(1+‖A‖₂)ⁿ."""
    n = A.shape[0]
    bound = tol * (1.0 + linalg.norm(A, 2)) ** n
    return linalg.norm(np.linalg.matrix_power(M, n), 2) <= bound


def _place_single_input(A: np.ndarray, b: np.ndarray, poles: np.ndarray) -> np.ndarray:
    """Fórmula de Ackermann; retorna f (1×n) tal que eig(A + b f) = poles."""
    K = np.asarray(control.acker(A, b, poles), dtype=np.float64).reshape(1, -1)
    return -K


def _place(
    A: np.ndarray,
    B: np.ndarray,
    poles: np.ndarray,
    accept,
    attempts: int,
    seed: int,
) -> np.ndarray:
    """
    Asignación de polos multi-entrada reduciendo a una entrada con un vector aleatorio w.

    Para cada intento se forma (A, Bw); si es controlable se aplica Ackermann y F = w·f.
    Se devuelve la primera F que satisface `accept(A + BF)`.
    """
    n, p = B.shape
    if p == 1:
        candidates = [np.ones(1)]
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        candidates = []
        for _ in range(attempts):
            w = rng.standard_normal(p)
            candidates.append(w / np.linalg.norm(w))

    for attempt, w in enumerate(candidates, start=1):
        b = B @ w.reshape(-1, 1)
        if numerical_rank(_ctrb(A, b)) != n:
            logger.debug("Intento %d: (A, Bw) no controlable, se reintenta", attempt)
            continue
        try:
            F = w.reshape(-1, 1) @ _place_single_input(A, b, poles)
        except ValueError as e:
            logger.debug("Intento %d: Ackermann rechazado (%s)", attempt, e)
            continue
        if accept(A + B @ F):
            if attempt > 1:
                logger.info("Asignación de polos aceptada en el intento %d", attempt)
            return F
    raise SynthesisError(f"No se obtuvo una ganancia válida tras {len(candidates)} intentos")


def deadbeat_gain(
    model: StateSpaceModel,
    attempts: int = settings.DEADBEAT_ATTEMPTS,
    tol: float = settings.NILPOTENT_TOL,
    seed: int = 0,
) -> np.ndarray:
    """
    Ganancia deadbeat F_d: A + BF_d nilpotente (polinomio deseado zⁿ).

    Args:
        model: Modelo controlable
        attempts: Reintentos con vectores w aleatorios (caso multi-entrada)
        tol: Tolerancia del certificado ‖(A+BF_d)ⁿ‖ ≤ tol·(1+‖A‖)ⁿ
        seed: Semilla de los vectores w

    Returns:
        F_d de forma p×n

    Raises:
        ModelError: Si (A, B) no es controlable
        SynthesisError: Si ningún intento supera el certificado
    """
    A, B = model.A, model.B
    if _nilpotent(A, A, tol):
        return np.zeros((model.p, model.n))
    if numerical_rank(_ctrb(A, B)) != model.n:
        raise ModelError("El modelo no es controlable: no existe ganancia deadbeat")
    return _place(
        A, B, np.zeros(model.n), lambda AF: _nilpotent(AF, A, tol), attempts, seed
    )


def _dual_gain(A: np.ndarray, C: np.ndarray, synth) -> np.ndarray:
    """L = −Fᵀ con F sintetizada sobre el par dual (Aᵀ, Cᵀ), de modo que A − LC = (Aᵀ + CᵀF)ᵀ."""
    return -synth(A.T, C.T).T


def observer_gain_deadbeat(
    model: StateSpaceModel,
    attempts: int = settings.DEADBEAT_ATTEMPTS,
    tol: float = settings.NILPOTENT_TOL,
    seed: int = 0,
) -> np.ndarray:
    """Ganancia de observador deadbeat L_d (A − L_d C nilpotente) por dualidad."""
    A, C = model.A, model.C
    if numerical_rank(_ctrb(A.T, C.T)) != model.n:
        raise ModelError("El modelo no es observable: no existe observador deadbeat")

    def synth(At, Ct):
        if _nilpotent(At, At, tol):
            return np.zeros((Ct.shape[1], At.shape[0]))
        return _place(At, Ct, np.zeros(model.n), lambda M: _nilpotent(M, At, tol), attempts, seed)

    return _dual_gain(A, C, synth)


def observer_gain_place(
    model: StateSpaceModel,
    radius: float,
    attempts: int = settings.DEADBEAT_ATTEMPTS,
    seed: int = 0,
) -> np.ndarray:
    """
    Ganancia de observador con radio espectral de A − LC ≤ radius.

    Los polos se ubican en n valores reales distintos dentro de [−radius, radius]
    (nodos de Chebyshev escalados). radius = 0 equivale al observador deadbeat.

    Raises:
        ParameterError: Si radius no está en [0, 1)
        ModelError: Si el modelo no es observable
    """
    if not 0.0 <= radius < 1.0:
        raise ParameterError(f"radius debe estar en [0, 1), recibido: {radius}")
    if radius == 0.0:
        return observer_gain_deadbeat(model, attempts=attempts, seed=seed)

    A, C = model.A, model.C
    n = model.n
    if numerical_rank(_ctrb(A.T, C.T)) != n:
        raise ModelError("El modelo no es observable")
    poles = radius * np.cos(np.pi * (2 * np.arange(n) + 1) / (2 * n))
    limit = radius * (1.0 + 1e-6) + 1e-9

    def synth(At, Ct):
        return _place(At, Ct, poles, lambda M: spectral_radius(M) <= limit, attempts, seed)

    return _dual_gain(A, C, synth)


def kalman_gain(
    model: StateSpaceModel,
    noise: NoiseModel,
    max_iter: int = settings.KALMAN_MAX_ITER,
    tol: float = settings.KALMAN_TOL,
) -> KalmanGain:
    """
    Ganancia de Kalman estacionaria por iteración de punto fijo del Riccati predictor.

    P ← APAᵀ + Σ_ω − (APCᵀ + S)(CPCᵀ + Σ_v)⁻¹(APCᵀ + S)ᵀ hasta
    ‖P_{k+1} − P_k‖ < tol·(1 + ‖P_k‖); luego L_K = (APCᵀ + S)Σ_r⁻¹ y Σ_r = CPCᵀ + Σ_v.

    Returns:
        KalmanGain(L, Sigma_r, P)

    Raises:
        ParameterError: Si CPCᵀ + Σ_v no es definida positiva
        ConvergenceError: Si no converge en max_iter iteraciones o A − L_K C no es Schur
    """
    A, C = model.A, model.C
    if noise.n != model.n or noise.m != model.m:
        raise ParameterError(
            f"El modelo de ruido ({noise.n}, {noise.m}) no coincide con el modelo ({model.n}, {model.m})"
        )
    Sw, S, Sv = noise.Sigma_w, noise.S_wv, noise.Sigma_v

    P = np.array(Sw, dtype=np.float64)
    for iteration in range(1, max_iter + 1):
        P_next = _riccati_map(A, C, Sw, S, Sv, P)
        delta = linalg.norm(P_next - P, 2)
        converged = delta < tol * (1.0 + linalg.norm(P, 2))
        P = P_next
        if not np.all(np.isfinite(P)):
            break
        if converged:
            logger.debug("Riccati convergió en %d iteraciones", iteration)
            break
    else:
        raise ConvergenceError(f"Riccati no convergió en {max_iter} iteraciones")
    if not np.all(np.isfinite(P)):
        raise ConvergenceError("La iteración de Riccati divergió")

    Sigma_r = C @ P @ C.T + Sv
    Sigma_r = 0.5 * (Sigma_r + Sigma_r.T)
    if linalg.eigvalsh(Sigma_r)[0] <= 0.0:
        raise ParameterError("CPCᵀ + Σ_v no es definida positiva")
    L = linalg.solve(Sigma_r, (A @ P @ C.T + S).T, assume_a="pos").T

    radius = spectral_radius(A - L @ C)
    if radius >= 1.0:
        raise ConvergenceError(f"A − L_K C no es Schur: radio espectral {radius:.4f}")
    return KalmanGain(L=L, Sigma_r=Sigma_r, P=P)


def _riccati_map(A, C, Sw, S, Sv, P) -> np.ndarray:
    G = A @ P @ C.T + S
    Re = C @ P @ C.T + Sv
    P_next = A @ P @ A.T + Sw - G @ linalg.solve(Re, G.T, assume_a="sym")
    return 0.5 * (P_next + P_next.T)


def riccati_residual(model: StateSpaceModel, noise: NoiseModel, P: np.ndarray) -> float:
    """‖map(P) − P‖ / max(1, ‖P‖): residuo relativo del punto fijo."""
    mapped = _riccati_map(model.A, model.C, noise.Sigma_w, noise.S_wv, noise.Sigma_v, P)
    return float(linalg.norm(mapped - P, 2) / max(1.0, linalg.norm(P, 2)))


def design_gains(
    model: StateSpaceModel,
    observer: str = "kalman",
    noise: NoiseModel | None = None,
    radius: float = 0.5,
    seed: int = 0,
) -> GainPair:
    """
    Par (F_d, L) usado para definir las variables latentes.

    Args:
        model: Planta
        observer: "kalman", "deadbeat" o "place"
        noise: Requerido para "kalman"
        radius: Radio para "place"
        seed: Semilla de la síntesis multi-entrada
    """
    F = deadbeat_gain(model, seed=seed)
    if observer == "kalman":
        if noise is None:
            raise ParameterError("observer='kalman' requiere un modelo de ruido")
        L = kalman_gain(model, noise).L
    elif observer == "deadbeat":
        L = observer_gain_deadbeat(model, seed=seed)
    elif observer == "place":
        L = observer_gain_place(model, radius, seed=seed)
    else:
        raise ParameterError(f"Observador desconocido: {observer}")
    return GainPair(F=F, L=L)
