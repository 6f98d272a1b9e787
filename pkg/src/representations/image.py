"""
Representación imagen de muestra finita [u_s; y_s] = [M_s; N_s]·v_{s+n}(k−n).
"""

from dataclasses import dataclass

import numpy as np

from src.core.exceptions import ConstructionError, DimensionError
from src.ltisim.models import StateSpaceModel
from src.representations._toeplitz import markov_sequence, toeplitz
from src.sigkit.rank import numerical_rank


@dataclass(frozen=True, eq=False)
class ImageRep:
    """
    Par (M_s, N_s) de la representación imagen para la ganancia F.

    Attributes:
        M_s: sp × (s+n)p, bloques M_0 = I, M_k = F A_F^{k−1} B
        N_s: sm × (s+n)p, bloques N_0 = D, N_k = C_F A_F^{k−1} B
        s: Profundidad de la ventana
        F: Ganancia usada
    """
    M_s: np.ndarray
    N_s: np.ndarray
    s: int
    F: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        """I_{G,s} = [M_s; N_s]."""
        return np.vstack([self.M_s, self.N_s])


def image_rep(model: StateSpaceModel, F: np.ndarray | None, s: int) -> ImageRep:
    """
    Construye (M_s, N_s) como Toeplitz T_{s,s+n} con offset base n.

    El bloque (l, j) es el parámetro de Markov de offset n+l−j del sistema
    (A_F, B, [F; C_F], [I; D]). Con F = 0 se obtiene [[0, I], [O_s C_n, T_{s,s}(G)]].

    Args:
        model: Planta
        F: Ganancia p×n (None = 0); con F deadbeat la relación con los datos es exacta
        s: Profundidad

    Returns:
        ImageRep

    Raises:
        DimensionError: Si s < 1
        ConstructionError: Si para s >= n el rango no es sp+n
    """
    if s < 1:
        raise DimensionError(f"s debe ser >= 1, recibido: {s}")
    n, p = model.n, model.p
    F = np.zeros((p, n)) if F is None else np.atleast_2d(np.asarray(F, dtype=np.float64))
    A_F, C_F = model.closed_loop(F)

    count = s + n
    M_blocks = markov_sequence(np.eye(p), F, A_F, model.B, count)
    N_blocks = markov_sequence(model.D, C_F, A_F, model.B, count)
    rep = ImageRep(
        M_s=toeplitz(M_blocks, s, s + n, n),
        N_s=toeplitz(N_blocks, s, s + n, n),
        s=s,
        F=F,
    )
    if s >= n:
        rank = numerical_rank(rep.stacked)
        if rank != s * p + n:
            raise ConstructionError(f"rank([M_s; N_s]) = {rank}, se esperaba sp+n = {s * p + n}")
    return rep
