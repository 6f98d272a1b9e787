"""
Matrices de reparametrización V, R y R̄ entre pares de ganancias (F₁, L₁) y (F₂, L₂).
"""

from dataclasses import dataclass

import numpy as np

from src.ltisim.models import StateSpaceModel
from src.representations._toeplitz import markov_sequence, toeplitz


@dataclass(frozen=True, eq=False)
class ParamMatrices:
    """V_{s+n}, R_{s+n} y R̄_{s+n}; V y R son triangulares inferiores con diagonal identidad."""
    V_spn: np.ndarray
    R_spn: np.ndarray
    Rbar_spn: np.ndarray

    @property
    def triangular(self) -> np.ndarray:
        """[[V, R̄], [0, R]]."""
        zero = np.zeros((self.R_spn.shape[0], self.V_spn.shape[1]))
        return np.block([[self.V_spn, self.Rbar_spn], [zero, self.R_spn]])


def _gain(value, shape) -> np.ndarray:
    return np.zeros(shape) if value is None else np.atleast_2d(np.asarray(value, dtype=np.float64))


def param_V(model: StateSpaceModel, F1, F2, s: int) -> np.ndarray:
    """V_{s+n} con V_0 = I y V_k = (F₁−F₂)A_{F₁}^{k−1}B; cumple M_{1,s} = M_{2,s}·V_{s+n}."""
    n, p = model.n, model.p
    F1, F2 = _gain(F1, (p, n)), _gain(F2, (p, n))
    A_F1, _ = model.closed_loop(F1)
    blocks = markov_sequence(np.eye(p), F1 - F2, A_F1, model.B, s + n)
    return toeplitz(blocks, s + n, s + n, 0)


def param_R_Rbar(
    model: StateSpaceModel, F1, L1, F2, L2, s: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    R_{s+n} y R̄_{s+n}.

    R_k = C A_{L₂}^{k−1}(L₁−L₂), R_0 = I;
    R̄_k = (F₁−F₂)A_{F₁}^{k−1}L₁ + F₂A_{L₂}^{k−1}(L₁−L₂), R̄_0 = 0.
    """
    n, p, m = model.n, model.p, model.m
    F1, F2 = _gain(F1, (p, n)), _gain(F2, (p, n))
    L1, L2 = _gain(L1, (n, m)), _gain(L2, (n, m))
    A_F1, _ = model.closed_loop(F1)
    A_L2, _ = model.observer_matrices(L2)
    count = s + n

    R_blocks = markov_sequence(np.eye(m), model.C, A_L2, L1 - L2, count)
    first = markov_sequence(np.zeros((p, m)), F1 - F2, A_F1, L1, count)
    second = markov_sequence(np.zeros((p, m)), F2, A_L2, L1 - L2, count)
    Rbar_blocks = [a + b for a, b in zip(first, second)]
    return toeplitz(R_blocks, count, count, 0), toeplitz(Rbar_blocks, count, count, 0)


def param_matrices(model: StateSpaceModel, F1, L1, F2, L2, s: int) -> ParamMatrices:
    R, Rbar = param_R_Rbar(model, F1, L1, F2, L2, s)
    return ParamMatrices(V_spn=param_V(model, F1, F2, s), R_spn=R, Rbar_spn=Rbar)
