"""
Representación kernel de muestra finita K_{G,s} = K₂[−T_{s,s}(G), I] con K₂O_s = 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import ConstructionError, EmptyKernelError
from src.ltisim.models import StateSpaceModel
from src.ltisim.structure import markov_toeplitz, observability_index, observability_matrix
from src.representations.image import image_rep
from src.sigkit.rank import numerical_rank


@dataclass(frozen=True, eq=False)
class KernelRep:
    """
    Attributes:
        K_Gs: (sm−n) × s(p+m)
        K2: (sm−n) × sm, filas ortonormales que generan el espacio nulo izquierdo de O_s
        s: Profundidad
    """
    K_Gs: np.ndarray
    K2: np.ndarray
    s: int

    @property
    def theta(self) -> int:
        return self.K2.shape[0]

    def residual(self, window: np.ndarray) -> np.ndarray:
        """r_K = K_{G,s}[u_s; y_s] para una ventana (o una matriz de ventanas por columnas)."""
        return self.K_Gs @ window

    def normalized(self) -> np.ndarray:
        """K_{G,s,n}: base ortonormal (por filas) del espacio de filas de K_{G,s}."""
        q, _ = linalg.qr(self.K_Gs.T, mode="economic")
        return q.T


def kernel_rep(
    model: StateSpaceModel, s: int, rel_tol: float = settings.RANK_REL_TOL
) -> KernelRep:
    """
    Construye K₂ por SVD completa de O_s y K_{G,s} = K₂[−T_{s,s}(G), I].

    Certifica K₂O_s ≈ 0, rank(K₂) = rank(K_{G,s}) = sm−n, K_{G,s}I_{G,s} ≈ 0
    y rank(K_{G,s}I_{C,s}) = sm−n para (F, L) = (0, 0).

    Raises:
        EmptyKernelError: Si s <= μ_obs
        ConstructionError: Si algún certificado falla
    """
    mu = observability_index(model)
    n, p, m = model.n, model.p, model.m
    if s <= mu:
        raise EmptyKernelError(
            f"s ({s}) debe ser > índice de observabilidad ({mu}) para un subespacio residual no vacío"
        )
    O_s = observability_matrix(model, s)
    U, _, _ = linalg.svd(O_s, full_matrices=True)
    K2 = U[:, n:].T
    theta = s * m - n

    scale = linalg.norm(K2, 2) * linalg.norm(O_s, 2)
    if linalg.norm(K2 @ O_s, 2) > rel_tol * scale:
        raise ConstructionError("K₂O_s ≠ 0")
    if numerical_rank(K2, rel_tol) != theta:
        raise ConstructionError(f"rank(K₂) ≠ sm−n = {theta}")

    K_Gs = K2 @ np.hstack([-markov_toeplitz(model, s), np.eye(s * m)])
    if numerical_rank(K_Gs, rel_tol) != theta:
        raise ConstructionError(f"rank(K_G,s) ≠ sm−n = {theta}")
    I_G = image_rep(model, None, s).stacked
    if linalg.norm(K_Gs @ I_G, 2) > rel_tol * linalg.norm(K_Gs, 2) * linalg.norm(I_G, 2) * I_G.shape[0]:
        raise ConstructionError("K_G,s·I_G,s ≠ 0")
    I_C0 = np.vstack([np.zeros((s * p, s * m)), np.eye(s * m)])
    if numerical_rank(K_Gs @ I_C0, rel_tol) != theta:
        raise ConstructionError(f"rank(K_G,s·I_C,s) ≠ sm−n = {theta}")
    return KernelRep(K_Gs=K_Gs, K2=K2, s=s)
