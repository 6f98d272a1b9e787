"""Matriz de datos entrada/salida T_{G,s} = [H_s(u); H_s(y)]."""

import logging
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import DimensionError
from src.ltisim.models import Trajectory
from src.sigkit.hankel import build_hankel
from src.sigkit.models import HankelMatrix, SignalSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HankelDataMatrix:
    """
    Attributes:
        T: s(p+m) × (N−s+1); filas superiores H_s(u), inferiores H_s(y)
        s: Profundidad
        N: Número de muestras usadas
        p, m: Dimensiones de entrada y salida
        normalized: True si T fue escalada por 1/√N
        start_index: k₀ de la primera muestra
    """
    T: np.ndarray
    s: int
    N: int
    p: int
    m: int
    normalized: bool = False
    start_index: int = 0

    @property
    def windows(self) -> int:
        return self.T.shape[1]

    @property
    def rows(self) -> int:
        return self.T.shape[0]

    def raw(self) -> np.ndarray:
        """Ventanas sin normalizar."""
        return self.T * np.sqrt(self.N) if self.normalized else self.T


def build_data_matrix(
    traj: Trajectory, s: int, normalize: bool = False, check_width: bool = True
) -> HankelDataMatrix:
    """
    Apila las Hankel de entrada y salida con la misma ventana de índices.

    Args:
        traj: Datos registrados
        s: Profundidad
        normalize: Si True divide por √N
        check_width: Si True emite un warning cuando N−s+1 < s(p+m)

    Raises:
        DimensionError: Si N < s
    """
    N = traj.length
    if N < s:
        raise DimensionError(f"N ({N}) debe ser >= s ({s})")
    T = np.vstack([build_hankel(traj.u, s).data, build_hankel(traj.y, s).data])
    rows = s * (traj.p + traj.m)
    if check_width and T.shape[1] < rows:
        logger.warning(
            "Matriz de datos angosta: N−s+1 = %d columnas < s(p+m) = %d filas", T.shape[1], rows
        )
    if normalize:
        T = T / np.sqrt(N)
    return HankelDataMatrix(
        T=T, s=s, N=N, p=traj.p, m=traj.m, normalized=normalize, start_index=traj.u.start_index
    )


def align_data(traj: Trajectory, n: int) -> Trajectory:
    """
    Descarta las primeras n muestras para que la ventana de datos j quede alineada
    con la ventana latente j de profundidad s+n.
    """
    if traj.length <= n:
        raise DimensionError(f"La trayectoria ({traj.length}) debe ser más larga que n ({n})")
    return traj.slice(n)


def latent_hankels(
    v: SignalSequence, r: SignalSequence, s: int, n: int
) -> tuple[HankelMatrix, HankelMatrix]:
    """H_{s+n}(v) y H_{s+n}(r) sobre toda la secuencia latente."""
    return build_hankel(v, s + n), build_hankel(r, s + n)
