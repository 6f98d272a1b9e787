"""
Modelos de datos del detector, resultados de evaluación y reportes de detección.
"""

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import linalg

from src.core.config import settings
from src.core.exceptions import BasisError, ParameterError, ShapeError

Mode = Literal["chi2", "svdd"]
MODES: tuple[str, ...] = ("chi2", "svdd")


@dataclass(frozen=True)
class DetectorMeta:
    """
    Attributes:
        s: Profundidad de la ventana sobre la que actúa el detector
        gamma: Dimensión del subespacio imagen descartado
        p, m: Dimensiones de entrada y salida
        alpha: Nivel de significancia (modo chi2)
        C: Parámetro de holgura (modo svdd)
        ridge: Regularización de la covarianza
        method: "projection", "parity", "ls_output" o "model"
        training_windows: Ventanas usadas para calibrar
    """
    s: int
    gamma: int
    p: int
    m: int
    alpha: float | None = None
    C: float | None = None
    ridge: float = settings.COV_RIDGE
    method: str = "projection"
    training_windows: int = 0

    @property
    def window_dim(self) -> int:
        return self.s * (self.p + self.m)

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "gamma": self.gamma,
            "p": self.p,
            "m": self.m,
            "alpha": self.alpha,
            "C": self.C,
            "ridge": self.ridge,
            "method": self.method,
            "training_windows": self.training_windows,
        }


@dataclass(frozen=True, eq=False)
class Detector:
    """
    Detector entrenado; inmutable y seguro de compartir entre hilos.

    Attributes:
        U2: θ' × s(p+m), filas ortonormales (base del subespacio residual)
        delta_hat: Offset estimado Δ̂ (θ')
        cov_inv_factor: Σ̂^{−1/2} simétrica (θ' × θ')
        threshold: Umbral; alarma si J > threshold
        mode: "chi2" o "svdd"
        meta: Parámetros de entrenamiento
    """
    U2: np.ndarray
    delta_hat: np.ndarray
    cov_inv_factor: np.ndarray
    threshold: float
    mode: Mode
    meta: DetectorMeta

    def __post_init__(self):
        U2 = np.atleast_2d(np.asarray(self.U2, dtype=np.float64))
        delta = np.asarray(self.delta_hat, dtype=np.float64).reshape(-1)
        W = np.atleast_2d(np.asarray(self.cov_inv_factor, dtype=np.float64))
        theta = U2.shape[0]
        if self.mode not in MODES:
            raise ParameterError(f"mode debe ser uno de {MODES}, recibido: {self.mode}")
        if U2.shape[1] != self.meta.window_dim:
            raise ShapeError(f"U2 debe tener {self.meta.window_dim} columnas, recibido: {U2.shape}")
        if delta.shape != (theta,) or W.shape != (theta, theta):
            raise ShapeError(
                f"Δ̂ {delta.shape} o factor {W.shape} incompatibles con θ' = {theta}"
            )
        if linalg.norm(U2 @ U2.T - np.eye(theta), 2) > settings.BASIS_TOL * max(1, theta):
            raise BasisError("Las filas de U2 no son ortonormales")
        if not np.allclose(W, W.T, rtol=1e-10, atol=1e-12 * linalg.norm(W, 2)):
            raise ParameterError("El factor de covarianza inversa debe ser simétrico")
        for name, arr in (("U2", U2), ("delta_hat", delta), ("cov_inv_factor", W)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def theta(self) -> int:
        return self.U2.shape[0]

    def residual(self, windows: np.ndarray) -> np.ndarray:
        """r = U2·w para una ventana o una matriz de ventanas por columnas."""
        windows = np.asarray(windows, dtype=np.float64)
        if windows.shape[0] != self.meta.window_dim:
            raise ShapeError(
                f"La ventana debe tener dimensión {self.meta.window_dim}, recibido: {windows.shape[0]}"
            )
        return self.U2 @ windows


@dataclass(frozen=True)
class EvaluationResult:
    k: int
    J: float
    alarm: bool


@dataclass(frozen=True, eq=False)
class SvddModel:
    """
    Bola mínima con holgura en coordenadas blanqueadas.

    Attributes:
        center: Centro (θ')
        radius_sq: Radio al cuadrado
        alphas: Variables duales en [0, C] con suma 1
        xi: Holguras max(0, d² − R²)
        distances_sq: d² de cada punto al centro
        C: Cota de la caja usada
    """
    center: np.ndarray
    radius_sq: float
    alphas: np.ndarray
    xi: np.ndarray
    distances_sq: np.ndarray
    C: float

    def kkt_residual(self, tiny: float = 1e-12) -> float:
        """Máxima violación de las condiciones KKT en términos de d² − R²."""
        at_zero = self.alphas <= tiny
        at_box = self.alphas >= self.C - tiny
        free = ~(at_zero | at_box)
        gap = self.distances_sq - self.radius_sq
        parts = [
            np.clip(gap[at_zero], 0.0, None),
            np.abs(gap[free]),
            np.clip(-gap[at_box], 0.0, None),
        ]
        return float(max((part.max() for part in parts if part.size), default=0.0))


@dataclass(frozen=True, eq=False)
class DetectionReport:
    """
    Resultado de evaluar un detector sobre una trayectoria con ventanas de paso 1.

    Attributes:
        far: Tasa de falsas alarmas sobre ventanas sin falla (None si no hay)
        mdr: Tasa de detecciones perdidas sobre ventanas con falla (None si no hay)
        mdr_settled: MDR sobre ventanas completamente posteriores al onset
        detection_delay: Primera alarma (última muestra de la ventana) menos onset
        anchors: Posición (0-based) de la primera muestra de cada ventana
        statistics: J por ventana
        alarms: J > threshold por ventana
        labels: True si la ventana cubre alguna muestra con falla
    """
    far: float | None
    mdr: float | None
    mdr_settled: float | None
    detection_delay: int | None
    anchors: np.ndarray
    statistics: np.ndarray
    alarms: np.ndarray
    labels: np.ndarray
    threshold: float
    onset: int | None = None
    config: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)

    @property
    def windows(self) -> int:
        return int(self.anchors.size)

    @property
    def fault_free_windows(self) -> int:
        return int(np.count_nonzero(~self.labels))

    @property
    def faulty_windows(self) -> int:
        return int(np.count_nonzero(self.labels))

    def summary(self) -> dict:
        """Resumen serializable (sin las series por ventana)."""
        return {
            "far": self.far,
            "mdr": self.mdr,
            "mdr_settled": self.mdr_settled,
            "detection_delay": self.detection_delay,
            "onset": self.onset,
            "threshold": self.threshold,
            "windows": self.windows,
            "fault_free_windows": self.fault_free_windows,
            "faulty_windows": self.faulty_windows,
            "alarms": int(np.count_nonzero(self.alarms)),
            "false_alarms": int(np.count_nonzero(self.alarms & ~self.labels)),
            "missed_detections": int(np.count_nonzero(~self.alarms & self.labels)),
            "config": self.config,
            "seeds": self.seeds,
        }
