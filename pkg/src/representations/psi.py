"""Pilas Ψ_s, Ψ_{s,0} y Ψ̄_{s,0} que parametrizan todas las ventanas entrada/salida."""

from dataclasses import dataclass

import numpy as np

from src.core.exceptions import ConstructionError, DimensionError
from src.ltisim.models import StateSpaceModel
from src.representations.image import image_rep
from src.representations.params import ParamMatrices, param_matrices
from src.sigkit.rank import numerical_rank


@dataclass(frozen=True, eq=False)
class PsiStack:
    """
    Attributes:
        Psi_s: s(p+m) × (s+n)(p+m), Ψ_{s,0}·[[V, R̄], [0, R]]
        Psi_s0: [I_{G₀}, I_{C₀}]
        Psi_bar_s0: [[M_{s,0}, 0], [N_{s,0}, I]]
        params: Matrices de reparametrización respecto de (0, 0)
    """
    Psi_s: np.ndarray
    Psi_s0: np.ndarray
    Psi_bar_s0: np.ndarray
    params: ParamMatrices
    s: int


def psi_stack(model: StateSpaceModel, F: np.ndarray | None, L: np.ndarray | None, s: int) -> PsiStack:
    """
    Ensambla las tres pilas y certifica que todas tienen rango s(p+m).

    Raises:
        ConstructionError: Si algún certificado de rango falla
    """
    if s < 1:
        raise DimensionError(f"s debe ser >= 1, recibido: {s}")
    n, p, m = model.n, model.p, model.m
    base = image_rep(model, None, s)
    I_C0 = np.vstack([
        np.zeros((s * p, (s + n) * m)),
        np.hstack([np.zeros((s * m, n * m)), np.eye(s * m)]),
    ])
    Psi_s0 = np.hstack([base.stacked, I_C0])
    params = param_matrices(model, F, L, None, None, s)
    Psi_s = Psi_s0 @ params.triangular
    Psi_bar_s0 = np.block([
        [base.M_s, np.zeros((s * p, s * m))],
        [base.N_s, np.eye(s * m)],
    ])

    expected = s * (p + m)
    for name, mat in (("Ψ_s", Psi_s), ("Ψ_{s,0}", Psi_s0), ("Ψ̄_{s,0}", Psi_bar_s0)):
        rank = numerical_rank(mat)
        if rank != expected:
            raise ConstructionError(f"rank({name}) = {rank}, se esperaba s(p+m) = {expected}")
    return PsiStack(Psi_s=Psi_s, Psi_s0=Psi_s0, Psi_bar_s0=Psi_bar_s0, params=params, s=s)
