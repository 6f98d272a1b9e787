"""
Descomposición SVD de la matriz de datos, proyectores ortogonales y métricas de gap.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import BasisError, DegenerateError, ParameterError, ShapeError
from src.sigkit.rank import numerical_rank
from src.subspace.data_matrix import HankelDataMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SubspaceDecomposition:
    """
    Attributes:
        U1: Primeros γ vectores singulares izquierdos (subespacio imagen estimado)
        U2: Vectores restantes (subespacio residual estimado)
        sigma: Valores singulares descendentes, completados con ceros hasta s(p+m)
        gamma: Rango de corte
        Vt1: Primeros γ vectores singulares derechos (filas)
    """
    U1: np.ndarray
    U2: np.ndarray
    sigma: np.ndarray
    gamma: int
    Vt1: np.ndarray

    @property
    def Sigma1(self) -> np.ndarray:
        return np.diag(self.sigma[: self.gamma])

    def low_rank(self) -> np.ndarray:
        """Aproximación de rango γ U₁Σ₁V₁ᵀ."""
        return (self.U1 * self.sigma[: self.gamma]) @ self.Vt1


@dataclass(frozen=True, eq=False)
class Projector:
    """Proyector ortogonal P = UUᵀ (simétrico e idempotente)."""
    P: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ShapeError(f"El proyector debe ser cuadrado, recibido: {P.shape}")
        if linalg.norm(P @ P - P, 2) > settings.BASIS_TOL * max(1, P.shape[0]):
            raise BasisError("P no es idempotente")
        object.__setattr__(self, "P", 0.5 * (P + P.T))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.P @ x

    @property
    def complement(self) -> "Projector":
        return Projector(np.eye(self.P.shape[0]) - self.P)


def _matrix_of(T) -> np.ndarray:
    return T.T if isinstance(T, HankelDataMatrix) else np.asarray(T, dtype=np.float64)


def svd_split(T: HankelDataMatrix | np.ndarray, gamma: int) -> SubspaceDecomposition:
    """
    SVD completa de T y corte en γ: U = [U₁ U₂] con U₁U₁ᵀ + U₂U₂ᵀ = I.

    Raises:
        ParameterError: Si γ no está en (0, s(p+m))
    """
    mat = _matrix_of(T)
    rows, cols = mat.shape
    if not 0 < gamma < rows:
        raise ParameterError(f"gamma debe estar en (0, {rows}), recibido: {gamma}")
    # con más columnas que filas la SVD económica ya entrega U cuadrada
    U, sigma, Vt = linalg.svd(mat, full_matrices=cols < rows)
    full_sigma = np.zeros(rows)
    full_sigma[: sigma.size] = sigma
    return SubspaceDecomposition(
        U1=U[:, :gamma], U2=U[:, gamma:], sigma=full_sigma, gamma=gamma, Vt1=Vt[:gamma]
    )


def projector_from_basis(U: np.ndarray, tol: float = settings.BASIS_TOL) -> Projector:
    """
    P = UUᵀ para una base ortonormal U (por columnas).

    Raises:
        BasisError: Si ‖UᵀU − I‖ > tol
    """
    U = np.atleast_2d(np.asarray(U, dtype=np.float64))
    if U.shape[0] == 1 and U.shape[1] > 1:
        U = U.T
    if linalg.norm(U.T @ U - np.eye(U.shape[1]), 2) > tol:
        raise BasisError("La matriz no tiene columnas ortonormales")
    return Projector(U @ U.T)


def column_basis(M: np.ndarray, rel_tol: float = settings.RANK_REL_TOL) -> np.ndarray:
    """Base ortonormal de Im(M) con la dimensión dada por el rango numérico."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    rank = numerical_rank(M, rel_tol)
    U, _, _ = linalg.svd(M, full_matrices=False)
    return U[:, :rank]


def gap_metric(U: np.ndarray, V: np.ndarray) -> float:
    """
    Gap δ = ‖(I − UUᵀ)V‖₂ entre los subespacios generados por U y V.

    Para dimensiones iguales es simétrico y coincide con ‖P_U − P_V‖₂. Con
    dimensiones distintas se retorna el gap dirigido y se registra un warning.

    Raises:
        ShapeError: Si la dimensión ambiente difiere
    """
    U = np.atleast_2d(np.asarray(U, dtype=np.float64))
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    if U.shape[0] != V.shape[0]:
        raise ShapeError(f"Dimensión ambiente distinta: {U.shape[0]} vs {V.shape[0]}")
    if U.shape[1] != V.shape[1]:
        logger.warning("Gap entre subespacios de dimensiones %d y %d (dirigido)", U.shape[1], V.shape[1])
    if V.shape[1] == 0:
        return 0.0
    residual = V - U @ (U.T @ V)
    return float(min(1.0, linalg.norm(residual, 2)))


def empirical_bound(sigma: np.ndarray, gamma: int) -> float:
    """σ²_{γ+1}/σ²_γ (γ es 1-based)."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if not 1 <= gamma < sigma.size:
        raise ParameterError(f"Se requiere 1 <= γ < {sigma.size}, recibido: {gamma}")
    if sigma[gamma - 1] == 0.0:
        raise DegenerateError(f"σ_γ = 0 para γ = {gamma}")
    return float(sigma[gamma] ** 2 / sigma[gamma - 1] ** 2)


def estimate_order(
    sigma: np.ndarray,
    s: int,
    p: int,
    m: int,
    gap_factor: float = settings.SPECTRAL_GAP_FACTOR,
    fallback: int | None = None,
    rel_tol: float = settings.RANK_REL_TOL,
) -> int:
    """
    Estima n por salto espectral en la ventana de índices [sp, sp+sm−1].

    Se toma el mayor índice i con σ_i/σ_{i+1} > gap_factor, ignorando los valores
    singulares por debajo del umbral de rango numérico; n = i − sp.

    Raises:
        DegenerateError: Si no hay salto y no se dio `fallback`
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    floor = rel_tol * sigma[0] * sigma.size if sigma.size and sigma[0] > 0 else 0.0
    best = None
    for i in range(s * p, min(s * p + s * m - 1, sigma.size - 1) + 1):
        # i es 1-based: σ_i = sigma[i−1]
        if i < 1 or sigma[i - 1] <= floor:
            continue
        ratio = np.inf if sigma[i] <= floor else sigma[i - 1] / sigma[i]
        if ratio > gap_factor:
            best = i
    if best is None:
        if fallback is None:
            raise DegenerateError("No se encontró salto espectral y no hay n de respaldo")
        logger.warning("Sin salto espectral claro; se usa n = %d", fallback)
        return fallback
    return best - s * p


def eckart_young_residual(T: HankelDataMatrix | np.ndarray, decomposition: SubspaceDecomposition) -> float:
    """‖T − U₁Σ₁V₁ᵀ‖₂, igual a σ_{γ+1}."""
    return float(linalg.norm(_matrix_of(T) - decomposition.low_rank(), 2))


def model_matching_residual(U1: np.ndarray, basis: np.ndarray) -> float:
    """min_Q ‖basis − U₁Q‖₂, alcanzado en Q = U₁ᵀ·basis."""
    Q = U1.T @ basis
    return float(linalg.norm(basis - U1 @ Q, 2))
