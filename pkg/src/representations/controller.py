"""
Representación imagen del controlador: [u_s; y_s] = [Ŷ_s; X̂_s]·r_{s+n}(k−n) con v = 0.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.core.config import settings
from src.core.exceptions import DimensionError, ParameterError
from src.ltisim.models import StateSpaceModel
from src.representations._toeplitz import markov_sequence, toeplitz
from src.representations.image import image_rep
from src.representations.params import param_R_Rbar

Method = Literal["auto", "toeplitz", "factorized"]


@dataclass(frozen=True, eq=False)
class ControllerImageRep:
    """
    Par (Ŷ_s, X̂_s) para las ganancias (F, L).

    Attributes:
        Y_hat_s: sp × (s+n)m
        X_hat_s: sm × (s+n)m
    """
    Y_hat_s: np.ndarray
    X_hat_s: np.ndarray
    s: int
    F: np.ndarray
    L: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        """I_{C,s} = [Ŷ_s; X̂_s]."""
        return np.vstack([self.Y_hat_s, self.X_hat_s])


def _is_deadbeat(A_F: np.ndarray) -> bool:
    n = A_F.shape[0]
    bound = settings.NILPOTENT_TOL * (1.0 + np.linalg.norm(A_F, 2)) ** n
    return np.linalg.norm(np.linalg.matrix_power(A_F, n), 2) <= bound


def _toeplitz_blocks(model, F, L, s):
    # Y_k = F A_F^{k−1} L, X_k = C_F A_F^{k−1} L, X_0 = I
    A_F, C_F = model.closed_loop(F)
    count = s + model.n
    Y_blocks = markov_sequence(np.zeros((model.p, model.m)), F, A_F, L, count)
    X_blocks = markov_sequence(np.eye(model.m), C_F, A_F, L, count)
    return toeplitz(Y_blocks, s, count, model.n), toeplitz(X_blocks, s, count, model.n)


def _factorized(model, F, L, s):
    # base (F, L) = (0, 0): Ŷ_{s,0} = 0, X̂_{s,0} = [0 I]
    base = image_rep(model, None, s)
    R, Rbar = param_R_Rbar(model, F, L, None, None, s)
    m, n = model.m, model.n
    X0 = np.hstack([np.zeros((s * m, n * m)), np.eye(s * m)])
    return base.M_s @ Rbar, base.N_s @ Rbar + X0 @ R


def controller_image_rep(
    model: StateSpaceModel,
    F: np.ndarray | None,
    L: np.ndarray | None,
    s: int,
    method: Method = "auto",
) -> ControllerImageRep:
    """
    Construye (Ŷ_s, X̂_s).

    Con F deadbeat los bloques Toeplitz se evalúan directamente; para (F, L)
    arbitrarios se usa la factorización sobre la base (0, 0): Ŷ = M_{s,0}R̄ y
    X̂ = N_{s,0}R̄ + [0 I]R. Ambas rutas coinciden para cualquier (F, L).

    Args:
        model: Planta
        F: Ganancia de realimentación p×n (None = 0)
        L: Ganancia de observador n×m (None = 0)
        s: Profundidad
        method: "auto" (Toeplitz si A+BF es nilpotente), "toeplitz" o "factorized"
    """
    if s < 1:
        raise DimensionError(f"s debe ser >= 1, recibido: {s}")
    n, p, m = model.n, model.p, model.m
    F = np.zeros((p, n)) if F is None else np.atleast_2d(np.asarray(F, dtype=np.float64))
    L = np.zeros((n, m)) if L is None else np.atleast_2d(np.asarray(L, dtype=np.float64))
    A_F, _ = model.closed_loop(F)
    model.observer_matrices(L)  # valida la forma de L

    if method == "auto":
        method = "toeplitz" if _is_deadbeat(A_F) else "factorized"
    if method == "toeplitz":
        Y, X = _toeplitz_blocks(model, F, L, s)
    elif method == "factorized":
        Y, X = _factorized(model, F, L, s)
    else:
        raise ParameterError(f"Método desconocido: {method}")
    return ControllerImageRep(Y_hat_s=Y, X_hat_s=X, s=s, F=F, L=L)
