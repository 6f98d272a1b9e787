"""Chequeo empírico de que Im(T_{G,s}) coincide con Im(I_{G,s}) en datos sin ruido."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import ShapeError
from src.ltisim.models import StateSpaceModel
from src.ltisim.simulator import _generator, simulate
from src.representations.image import image_rep
from src.sigkit.models import SignalSequence
from src.sigkit.rank import numerical_rank
from src.subspace.data_matrix import HankelDataMatrix
from src.subspace.decomposition import column_basis, gap_metric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FundamentalLemmaReport:
    data_rank: int
    image_rank: int
    gap: float
    max_member_residual: float
    windows_checked: int
    rel_tol: float

    @property
    def holds(self) -> bool:
        return (
            self.data_rank == self.image_rank
            and self.gap <= self.rel_tol
            and self.max_member_residual <= self.rel_tol
        )


def fundamental_lemma_check(
    T: HankelDataMatrix,
    model: StateSpaceModel,
    F: np.ndarray | None = None,
    rel_tol: float = settings.IDENTITY_TOL,
    n_windows: int = 50,
    seed: int = 0,
) -> FundamentalLemmaReport:
    """
    Compara el subespacio de columnas de la matriz de datos con Im(I_{G,s}).

    Además genera `n_windows` ventanas nuevas del modelo (estado inicial y entrada
    aleatorios, sin ruido) y mide el residuo relativo de mínimos cuadrados
    min_g ‖T g − w‖/‖w‖ de cada una.

    Args:
        T: Matriz de datos de una trayectoria sin ruido
        model: Planta
        F: Ganancia de la representación imagen (no altera el subespacio)
        rel_tol: Tolerancia de gap y de pertenencia
        n_windows: Ventanas nuevas a verificar
        seed: Semilla de las ventanas nuevas

    Returns:
        FundamentalLemmaReport
    """
    if T.p != model.p or T.m != model.m:
        raise ShapeError("La matriz de datos no corresponde a las dimensiones del modelo")
    s = T.s
    I_G = image_rep(model, F, s).stacked
    data_basis = column_basis(T.T)
    image_basis = column_basis(I_G)
    gap = gap_metric(data_basis, image_basis)

    rng = _generator(seed)
    worst = 0.0
    for _ in range(n_windows):
        x0 = rng.standard_normal(model.n)
        u = SignalSequence(rng.standard_normal((s, model.p)))
        traj = simulate(model, u, x0=x0)
        w = np.concatenate([traj.u.samples.reshape(-1), traj.y.samples.reshape(-1)])
        g, *_ = linalg.lstsq(T.T, w)
        worst = max(worst, float(linalg.norm(T.T @ g - w) / linalg.norm(w)))

    report = FundamentalLemmaReport(
        data_rank=numerical_rank(T.T),
        image_rank=image_basis.shape[1],
        gap=gap,
        max_member_residual=worst,
        windows_checked=n_windows,
        rel_tol=rel_tol,
    )
    logger.debug("Lema fundamental: %s", report)
    return report
