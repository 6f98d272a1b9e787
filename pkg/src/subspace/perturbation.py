"""
Cota tipo Davis-Kahan con información oráculo de las variables latentes.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.core.exceptions import BoundViolationError, DegenerateError, ShapeError
from src.ltisim.models import StateSpaceModel
from src.representations.psi import psi_stack
from src.sigkit.models import HankelMatrix
from src.subspace.data_matrix import HankelDataMatrix
from src.subspace.decomposition import column_basis, gap_metric, svd_split

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerturbationReport:
    """
    Attributes:
        bound: ‖S₂‖/λ_γ(S₁)
        gap: ‖P_{I_G} − U₁U₁ᵀ‖₂ medido
        cross_norm: Norma del término cruzado imagen/residuo
        residual_norm: Norma del término puramente residual
        lambda_gamma: γ-ésimo autovalor de S₁
        gamma: sp+n
    """
    bound: float
    gap: float
    cross_norm: float
    residual_norm: float
    lambda_gamma: float
    gamma: int

    @property
    def applicable(self) -> bool:
        return self.bound < 1.0

    @property
    def holds(self) -> bool:
        return self.gap <= self.bound + 1e-10


def davis_kahan_oracle_bound(
    model: StateSpaceModel,
    F: np.ndarray | None,
    L: np.ndarray | None,
    latent_v: HankelMatrix,
    latent_r: HankelMatrix,
    data: HankelDataMatrix | None = None,
    strict: bool = True,
) -> PerturbationReport:
    """
    Evalúa la cota del ángulo entre el subespacio imagen y el estimado por SVD.

    Con Σ_v = H(v)H(v)ᵀ/N, Σ_vr y Σ_r análogos:
        S₁ = I_G Σ_v I_Gᵀ
        S₂ = I_G Σ_vr I_Cᵀ + I_C Σ_vrᵀ I_Gᵀ + I_C Σ_r I_Cᵀ

    Si `data` es None la matriz de datos se forma como Ψ_s·[H(v); H(r)] (exacta
    para cualquier par de ganancias); si se da, U₁ sale de su SVD.

    Cuando la cota es informativa (< 1) se exige gap <= cota; con `strict=False`
    sólo se reporta.

    Raises:
        ShapeError: Si las Hankel latentes no son compatibles
        DegenerateError: Si λ_γ(S₁) = 0
        BoundViolationError: Si strict, la cota es < 1 y el gap la supera
    """
    n, p, m = model.n, model.p, model.m
    s = latent_v.depth - n
    if s < 1 or latent_r.depth != latent_v.depth or latent_v.columns != latent_r.columns:
        raise ShapeError("Las Hankel latentes deben tener profundidad s+n y el mismo número de columnas")
    if latent_v.shape[0] != (s + n) * p or latent_r.shape[0] != (s + n) * m:
        raise ShapeError("Dimensiones de las señales latentes incompatibles con el modelo")

    gamma = s * p + n
    if gamma >= s * (p + m):
        raise DegenerateError(f"γ = sp+n = {gamma} >= s(p+m): no hay subespacio residual")

    psi = psi_stack(model, F, L, s)
    I_G = psi.Psi_s[:, : (s + n) * p]
    I_C = psi.Psi_s[:, (s + n) * p :]
    Hv, Hr = latent_v.data, latent_r.data
    N = Hv.shape[1]

    S1 = I_G @ (Hv @ Hv.T / N) @ I_G.T
    cross = I_G @ (Hv @ Hr.T / N) @ I_C.T
    cross = cross + cross.T
    residual = I_C @ (Hr @ Hr.T / N) @ I_C.T
    S2 = cross + residual

    eigs = linalg.eigvalsh(0.5 * (S1 + S1.T))[::-1]
    lambda_gamma = float(eigs[gamma - 1])
    if lambda_gamma <= 1e-14 * max(eigs[0], 0.0) or lambda_gamma <= 0.0:
        raise DegenerateError("λ_γ(S₁) = 0: la excitación latente no es suficiente")
    bound = float(linalg.norm(S2, 2) / lambda_gamma)

    T = psi.Psi_s @ np.vstack([Hv, Hr]) if data is None else data.T
    U1 = svd_split(T, gamma).U1
    gap = gap_metric(U1, column_basis(I_G))

    report = PerturbationReport(
        bound=bound,
        gap=gap,
        cross_norm=float(linalg.norm(cross, 2)),
        residual_norm=float(linalg.norm(residual, 2)),
        lambda_gamma=lambda_gamma,
        gamma=gamma,
    )
    if not report.applicable:
        logger.info("Cota no informativa (%.3g >= 1); se reporta sin verificar", bound)
    elif not report.holds:
        message = f"gap {gap:.3e} > cota {bound:.3e}"
        if strict:
            raise BoundViolationError(message)
        logger.warning("Cota de Davis-Kahan violada: %s", message)
    return report
