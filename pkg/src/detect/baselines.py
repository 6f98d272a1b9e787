"""
Generadores de residuos de referencia: espacio de paridad (con modelo) y
estimación de salida por mínimos cuadrados (solo datos).
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import ConditioningError, EmptyKernelError, ParameterError, ShapeError
from src.detect.evaluation import trajectory_windows
from src.detect.models import Detector, DetectorMeta, Mode
from src.detect.trainer import calibrated_detector
from src.ltisim.models import StateSpaceModel, Trajectory
from src.ltisim.structure import markov_toeplitz, observability_index, observability_matrix
from src.sigkit.hankel import build_hankel
from src.sigkit.rank import numerical_rank

logger = logging.getLogger(__name__)


def _orthonormal_rows(mtx: np.ndarray) -> np.ndarray:
    q, _ = linalg.qr(mtx.T, mode="economic")
    return q.T


@dataclass(frozen=True, eq=False)
class ParityResidualGenerator:
    """
    r(k) = P_s(y_s − T_{s,s}(G)u_s) con P_sO_s = 0.

    Attributes:
        P_s: (sm−n) × sm
        T_ss: sm × sp, Toeplitz de parámetros de Markov
    """
    P_s: np.ndarray
    T_ss: np.ndarray
    s: int
    p: int
    m: int

    @property
    def residual_map(self) -> np.ndarray:
        """P_s[−T_{s,s}, I] sobre ventanas [u_s; y_s]."""
        return self.P_s @ np.hstack([-self.T_ss, np.eye(self.s * self.m)])

    def residual(self, window: np.ndarray) -> np.ndarray:
        window = np.asarray(window, dtype=np.float64)
        u, y = window[: self.s * self.p], window[self.s * self.p :]
        return self.P_s @ (y - self.T_ss @ u)

    def residuals(self, traj: Trajectory) -> np.ndarray:
        return self.residual_map @ trajectory_windows(traj, self.s)

    def to_detector(
        self,
        train: Trajectory,
        mode: Mode = "chi2",
        alpha: float = 0.05,
        C: float = 1.0,
        ridge: float = settings.COV_RIDGE,
    ) -> Detector:
        """Calibra umbral y covarianza con datos nominales sobre las filas ortonormalizadas."""
        U2 = _orthonormal_rows(self.residual_map)
        meta = DetectorMeta(
            s=self.s, gamma=self.s * (self.p + self.m) - U2.shape[0], p=self.p, m=self.m,
            alpha=alpha, C=C, ridge=ridge, method="parity",
        )
        return calibrated_detector(U2, trajectory_windows(train, self.s), meta, mode)


def baseline_parity(
    model: StateSpaceModel, s: int, Ps_rows: np.ndarray | None = None
) -> ParityResidualGenerator:
    """
    Generador de paridad; por defecto P_s es una base ortonormal del espacio nulo
    izquierdo de O_s.

    Raises:
        EmptyKernelError: Si s <= μ_obs
        ParameterError: Si las filas dadas no anulan O_s
    """
    mu = observability_index(model)
    if s <= mu:
        raise EmptyKernelError(f"Espacio de paridad vacío: s ({s}) <= μ_obs ({mu})")
    O_s = observability_matrix(model, s)
    if Ps_rows is None:
        P_s = linalg.null_space(O_s.T).T
    else:
        P_s = np.atleast_2d(np.asarray(Ps_rows, dtype=np.float64))
        if P_s.shape[1] != s * model.m:
            raise ShapeError(f"P_s debe tener {s * model.m} columnas, recibido: {P_s.shape}")
        if linalg.norm(P_s @ O_s, 2) > settings.IDENTITY_TOL * linalg.norm(P_s, 2) * linalg.norm(O_s, 2):
            raise ParameterError("Las filas de P_s no anulan la matriz de observabilidad")
        if numerical_rank(P_s) != P_s.shape[0]:
            raise ParameterError("P_s debe tener rango de filas completo")
    return ParityResidualGenerator(
        P_s=P_s, T_ss=markov_toeplitz(model, s), s=s, p=model.p, m=model.m
    )


@dataclass(frozen=True, eq=False)
class LSOutputResidualGenerator:
    """
    r_{y,s}(k) = y_s(k) − Φ_s·[u_ρ(k−ρ); y_ρ(k−ρ); u_s(k)].

    Actúa sobre ventanas de profundidad ρ+s: ρ muestras pasadas y s futuras.

    Attributes:
        Phi: sm × ((ρ+s)p + ρm), columnas [u pasado | y pasado | u futuro]
    """
    Phi: np.ndarray
    s: int
    rho: int
    p: int
    m: int

    @property
    def depth(self) -> int:
        return self.rho + self.s

    @property
    def residual_map(self) -> np.ndarray:
        s, rho, p, m = self.s, self.rho, self.p, self.m
        up, yp = self.Phi[:, : rho * p], self.Phi[:, rho * p : rho * (p + m)]
        uf = self.Phi[:, rho * (p + m) :]
        # ventana [u_{ρ+s}; y_{ρ+s}] = [u pasado; u futuro; y pasado; y futuro]
        return np.hstack([-up, -uf, -yp, np.eye(s * m)])

    def residuals(self, traj: Trajectory) -> np.ndarray:
        return self.residual_map @ trajectory_windows(traj, self.depth)

    def to_detector(
        self,
        train: Trajectory,
        mode: Mode = "chi2",
        alpha: float = 0.05,
        C: float = 1.0,
        ridge: float = settings.COV_RIDGE,
    ) -> Detector:
        U2 = _orthonormal_rows(self.residual_map)
        meta = DetectorMeta(
            s=self.depth, gamma=self.depth * (self.p + self.m) - U2.shape[0], p=self.p, m=self.m,
            alpha=alpha, C=C, ridge=ridge, method="ls_output",
        )
        return calibrated_detector(U2, trajectory_windows(train, self.depth), meta, mode)


def ls_regressors(traj: Trajectory, s: int, rho: int) -> tuple[np.ndarray, np.ndarray]:
    """(Z, Y): Z = [H_ρ(u) pasado; H_ρ(y) pasado; H_s(u) futuro], Y = H_s(y) futuro."""
    depth = rho + s
    Hu = build_hankel(traj.u, depth).data
    Hy = build_hankel(traj.y, depth).data
    p, m = traj.p, traj.m
    Z = np.vstack([Hu[: rho * p], Hy[: rho * m], Hu[rho * p :]])
    return Z, Hy[rho * m :]


def baseline_ls_output(
    train: Trajectory,
    s: int,
    rho: int,
    ridge: float = 0.0,
    pinv_rcond: float | None = None,
) -> LSOutputResidualGenerator:
    """
    Φ_s = argmin ‖H_s(y) − Φ·Z‖_F por QR con pivoteo de Zᵀ.

    Args:
        train: Datos nominales
        s: Profundidad futura
        rho: Profundidad pasada (ρ > n para que el residuo nominal se anule)
        ridge: Tikhonov si el regresor es deficiente en rango
        pinv_rcond: Solución de norma mínima si el regresor es deficiente y ridge = 0

    Raises:
        ParameterError: Si s o ρ < 1
        ConditioningError: Regresor deficiente en rango sin ridge ni pinv_rcond
    """
    if s < 1 or rho < 1:
        raise ParameterError(f"s y ρ deben ser >= 1, recibido: s={s}, ρ={rho}")
    Z, Y = ls_regressors(train, s, rho)
    if Z.shape[1] < Z.shape[0]:
        logger.warning("Regresor angosto: %d columnas < %d filas", Z.shape[1], Z.shape[0])

    Q, R, piv = linalg.qr(Z.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.count_nonzero(diag > settings.RANK_REL_TOL * diag[0] * max(Z.shape))) if diag.size else 0
    if rank == Z.shape[0]:
        coeffs = linalg.solve_triangular(R, Q.T @ Y.T)
        Phi_T = np.empty_like(coeffs)
        Phi_T[piv] = coeffs
        Phi = Phi_T.T
    elif ridge > 0:
        logger.info("Regresor de rango %d < %d; se usa Tikhonov (ridge=%g)", rank, Z.shape[0], ridge)
        G = Z @ Z.T
        Phi = linalg.solve(G + ridge * np.trace(G) / G.shape[0] * np.eye(G.shape[0]), Z @ Y.T, assume_a="pos").T
    elif pinv_rcond is not None:
        Phi = Y @ linalg.pinv(Z, rtol=pinv_rcond)
    else:
        raise ConditioningError(
            f"Regresor deficiente en rango ({rank} < {Z.shape[0]}); use ridge > 0 o pinv_rcond"
        )
    return LSOutputResidualGenerator(Phi=Phi, s=s, rho=rho, p=train.p, m=train.m)


def residual_dimensions(s: int, rho: int, p: int, m: int, n: int) -> dict[str, int]:
    """Dimensión del residuo de cada método sobre ventanas de igual información (ρ+s)."""
    return {
        "projection": (s + rho) * m - n,
        "parity": (s + rho) * m - n,
        "ls_output": s * m,
    }
