"""Matrices estructurales del modelo: O_s, C_s, parámetros de Markov y potencias."""

import numpy as np
from scipy import linalg

from src.core.exceptions import DimensionError, ModelError
from src.ltisim.models import StateSpaceModel
from src.sigkit.models import BlockToeplitzSpec
from src.sigkit.rank import numerical_rank
from src.sigkit.toeplitz import realize_toeplitz

_UNDERFLOW = 1e-300


def matrix_powers(M: np.ndarray, count: int) -> list[np.ndarray]:
    """
    Retorna [M⁰, M¹, …, M^count] por multiplicación repetida.

    Si una potencia cae por debajo de 1e−300 (caso nilpotente) las siguientes son ceros.
    """
    M = np.asarray(M, dtype=np.float64)
    powers = [np.eye(M.shape[0])]
    for _ in range(count):
        prev = powers[-1]
        if not np.any(prev) or np.max(np.abs(prev)) < _UNDERFLOW:
            powers.append(np.zeros_like(M))
        else:
            powers.append(prev @ M)
    return powers


def spectral_radius(M: np.ndarray) -> float:
    return float(np.max(np.abs(linalg.eigvals(M))))


def observability_matrix(model: StateSpaceModel, s: int) -> np.ndarray:
    """O_s = [C; CA; …; CA^{s−1}] (sm×n)."""
    if s < 1:
        raise DimensionError(f"s debe ser >= 1, recibido: {s}")
    return np.vstack([model.C @ Ak for Ak in matrix_powers(model.A, s - 1)])


def controllability_matrix(model: StateSpaceModel, s: int) -> np.ndarray:
    """C_s = [B, AB, …, A^{s−1}B] (n×sp)."""
    if s < 1:
        raise DimensionError(f"s debe ser >= 1, recibido: {s}")
    return np.hstack([Ak @ model.B for Ak in matrix_powers(model.A, s - 1)])


def observability_index(model: StateSpaceModel) -> int:
    """Menor s con rank(O_s) = n."""
    obsv = observability_matrix(model, model.n)
    m = model.m
    for s in range(1, model.n + 1):
        if numerical_rank(obsv[: s * m]) == model.n:
            return s
    raise ModelError("El modelo no es observable: rank(O_n) < n")


def markov_parameters(model: StateSpaceModel, count: int) -> list[np.ndarray]:
    """Respuesta al impulso [D, CB, CAB, …] con `count` bloques."""
    blocks = [model.D]
    for Ak in matrix_powers(model.A, max(count - 2, 0)):
        if len(blocks) == count:
            break
        blocks.append(model.C @ Ak @ model.B)
    return blocks[:count]


def markov_toeplitz(model: StateSpaceModel, s: int) -> np.ndarray:
    """T_{s,s}(G): Toeplitz triangular inferior con D en la diagonal y CA^{k−1}B en el offset k."""
    spec = BlockToeplitzSpec.from_blocks(markov_parameters(model, s), s, s, offset_base=0)
    return realize_toeplitz(spec)
