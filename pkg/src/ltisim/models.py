"""
Modelos de datos de la planta LTI, ruido, fallas y trayectorias.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

from src.core.exceptions import ModelError, ParameterError, ShapeError
from src.sigkit.models import SignalSequence
from src.sigkit.rank import numerical_rank


def _matrix(values, name: str) -> np.ndarray:
    arr = np.atleast_2d(np.array(values, dtype=np.float64))
    if arr.ndim != 2:
        raise ShapeError(f"{name} debe ser una matriz 2-D, recibido: ndim={arr.ndim}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """
    Realización mínima x(k+1) = Ax + Bu, y = Cx + Du.

    Attributes:
        A: n×n
        B: n×p
        C: m×n
        D: m×p (ceros si se omite)
        validate: Si True, exige controlabilidad y observabilidad (rank C_n = rank O_n = n)
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray | None = None
    validate: bool = True

    def __post_init__(self):
        A = _matrix(self.A, "A")
        B = _matrix(self.B, "B")
        C = _matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n) or n < 1:
            raise ShapeError(f"A debe ser cuadrada n×n con n >= 1, recibido: {A.shape}")
        if B.shape[0] != n:
            raise ShapeError(f"B debe tener {n} filas, recibido: {B.shape}")
        if C.shape[1] != n:
            raise ShapeError(f"C debe tener {n} columnas, recibido: {C.shape}")
        D = np.zeros((C.shape[0], B.shape[1])) if self.D is None else self.D
        D = _matrix(D, "D")
        if D.shape != (C.shape[0], B.shape[1]):
            raise ShapeError(f"D debe ser {C.shape[0]}×{B.shape[1]}, recibido: {D.shape}")

        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

        if self.validate:
            ctrb = np.hstack([np.linalg.matrix_power(A, k) @ B for k in range(n)])
            obsv = np.vstack([C @ np.linalg.matrix_power(A, k) for k in range(n)])
            if numerical_rank(ctrb) != n:
                raise ModelError("El modelo no es controlable: rank(C_n) < n")
            if numerical_rank(obsv) != n:
                raise ModelError("El modelo no es observable: rank(O_n) < n")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.B.shape[1]

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def closed_loop(self, F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Retorna (A_F, C_F) = (A + BF, C + DF)."""
        F = np.atleast_2d(np.asarray(F, dtype=np.float64))
        if F.shape != (self.p, self.n):
            raise ShapeError(f"F debe ser {self.p}×{self.n}, recibido: {F.shape}")
        return self.A + self.B @ F, self.C + self.D @ F

    def observer_matrices(self, L: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Retorna (A_L, B_L) = (A − LC, B − LD)."""
        L = np.atleast_2d(np.asarray(L, dtype=np.float64))
        if L.shape != (self.n, self.m):
            raise ShapeError(f"L debe ser {self.n}×{self.m}, recibido: {L.shape}")
        return self.A - L @ self.C, self.B - L @ self.D

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "B": self.B.tolist(), "C": self.C.tolist(), "D": self.D.tolist()}


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """
    Covarianzas del ruido de proceso ω y de medición v.

    La covarianza conjunta Σ = [[Σ_ω, S_ωv], [S_ωvᵀ, Σ_v]] debe ser semidefinida positiva.
    """
    Sigma_w: np.ndarray
    S_wv: np.ndarray | None
    Sigma_v: np.ndarray

    def __post_init__(self):
        Sw = _matrix(self.Sigma_w, "Sigma_w")
        Sv = _matrix(self.Sigma_v, "Sigma_v")
        n, m = Sw.shape[0], Sv.shape[0]
        if Sw.shape != (n, n) or Sv.shape != (m, m):
            raise ShapeError(f"Σ_ω y Σ_v deben ser cuadradas, recibido: {Sw.shape}, {Sv.shape}")
        S = np.zeros((n, m)) if self.S_wv is None else np.asarray(self.S_wv, dtype=np.float64)
        if S.size != n * m:
            raise ShapeError(f"S_ωv debe ser {n}×{m}, recibido: {S.shape}")
        S = _matrix(S.reshape(n, m), "S_wv")
        object.__setattr__(self, "Sigma_w", Sw)
        object.__setattr__(self, "S_wv", S)
        object.__setattr__(self, "Sigma_v", Sv)

        joint = self.joint
        if not np.allclose(joint, joint.T, atol=1e-12 * max(1.0, np.trace(joint))):
            raise ParameterError("La covarianza conjunta del ruido no es simétrica")
        eigmin = linalg.eigvalsh(joint)[0]
        if eigmin < -1e-12 * max(np.trace(joint), 1e-300):
            raise ParameterError(
                f"La covarianza conjunta del ruido no es PSD: λ_min={eigmin:.3e}"
            )

    @classmethod
    def isotropic(cls, n: int, m: int, process_std: float, measurement_std: float) -> "NoiseModel":
        """Ruido blanco independiente con desviaciones estándar escalares."""
        return cls(
            Sigma_w=process_std**2 * np.eye(n),
            S_wv=np.zeros((n, m)),
            Sigma_v=measurement_std**2 * np.eye(m),
        )

    @property
    def n(self) -> int:
        return self.Sigma_w.shape[0]

    @property
    def m(self) -> int:
        return self.Sigma_v.shape[0]

    @property
    def joint(self) -> np.ndarray:
        return np.block([[self.Sigma_w, self.S_wv], [self.S_wv.T, self.Sigma_v]])

    def sqrt_joint(self) -> np.ndarray:
        """Raíz cuadrada simétrica PSD de Σ (autovalores negativos por redondeo se anulan)."""
        eigvals, eigvecs = linalg.eigh(self.joint)
        root = np.sqrt(np.clip(eigvals, 0.0, None))
        return (eigvecs * root) @ eigvecs.T

    def scaled(self, factor: float) -> "NoiseModel":
        """Escala las desviaciones estándar por `factor` (covarianzas por factor²)."""
        f2 = factor**2
        return NoiseModel(self.Sigma_w * f2, self.S_wv * f2, self.Sigma_v * f2)


FaultFn = Callable[[int], np.ndarray]


@dataclass(frozen=True, eq=False)
class FaultProfile:
    """
    Fallas inyectadas a partir de `onset` (índice de muestra 0-based).

    Attributes:
        onset: Primera muestra afectada
        sensor_fault: t → vector m sumado a y
        actuator_fault: t → vector p sumado a la entrada de la planta (no a la u registrada)
        sensor_gain: Vector m; tras el onset y ← y + g⊙y_nominal (falla multiplicativa)
    """
    onset: int
    sensor_fault: FaultFn | None = None
    actuator_fault: FaultFn | None = None
    sensor_gain: np.ndarray | None = None

    def __post_init__(self):
        if self.onset < 0:
            raise ParameterError(f"onset debe ser >= 0, recibido: {self.onset}")
        if self.sensor_gain is not None:
            object.__setattr__(
                self, "sensor_gain", np.atleast_1d(np.asarray(self.sensor_gain, dtype=np.float64))
            )

    @classmethod
    def step(
        cls,
        onset: int,
        sensor_bias=None,
        actuator_bias=None,
        sensor_gain=None,
    ) -> "FaultProfile":
        """Fallas tipo escalón constantes a partir de `onset`."""
        sensor = None if sensor_bias is None else np.atleast_1d(np.asarray(sensor_bias, float))
        actuator = None if actuator_bias is None else np.atleast_1d(np.asarray(actuator_bias, float))
        return cls(
            onset=onset,
            sensor_fault=None if sensor is None else (lambda t: sensor),
            actuator_fault=None if actuator is None else (lambda t: actuator),
            sensor_gain=sensor_gain,
        )

    def active(self, t: int) -> bool:
        return t >= self.onset

    def sensor(self, t: int, m: int) -> np.ndarray:
        if self.sensor_fault is None or not self.active(t):
            return np.zeros(m)
        return np.broadcast_to(np.asarray(self.sensor_fault(t), dtype=np.float64), (m,))

    def actuator(self, t: int, p: int) -> np.ndarray:
        if self.actuator_fault is None or not self.active(t):
            return np.zeros(p)
        return np.broadcast_to(np.asarray(self.actuator_fault(t), dtype=np.float64), (p,))

    def gain(self, t: int, m: int) -> np.ndarray:
        if self.sensor_gain is None or not self.active(t):
            return np.zeros(m)
        return np.broadcast_to(self.sensor_gain, (m,))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Datos entrada/salida registrados con etiquetas de falla por muestra."""
    u: SignalSequence
    y: SignalSequence
    labels: np.ndarray
    x: SignalSequence | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=bool).reshape(-1)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if self.u.length != self.y.length or labels.shape[0] != self.u.length:
            raise ShapeError(
                f"u, y y labels deben tener la misma longitud: "
                f"{self.u.length}, {self.y.length}, {labels.shape[0]}"
            )
        if self.u.start_index != self.y.start_index:
            raise ShapeError("u e y deben compartir el índice inicial")

    @property
    def length(self) -> int:
        return self.u.length

    @property
    def p(self) -> int:
        return self.u.dim

    @property
    def m(self) -> int:
        return self.y.dim

    def slice(self, start: int, stop: int | None = None) -> "Trajectory":
        """Sub-trayectoria por posición conservando la indexación absoluta."""
        stop = self.length if stop is None else stop
        return Trajectory(
            u=self.u.slice(start, stop),
            y=self.y.slice(start, stop),
            labels=self.labels[start:stop],
            x=None if self.x is None else self.x.slice(start, stop),
        )


@dataclass(frozen=True, eq=False)
class GainPair:
    """Realimentación de estado F (p×n) y ganancia de observador L (n×m), ambas Schur."""
    F: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "F", _matrix(self.F, "F"))
        object.__setattr__(self, "L", _matrix(self.L, "L"))

    def check(self, model: StateSpaceModel) -> "GainPair":
        """Verifica que A+BF y A−LC tengan radio espectral < 1."""
        A_F, _ = model.closed_loop(self.F)
        A_L, _ = model.observer_matrices(self.L)
        for name, mat in (("A+BF", A_F), ("A−LC", A_L)):
            radius = float(np.max(np.abs(linalg.eigvals(mat))))
            if radius >= 1.0:
                raise ParameterError(f"{name} no es Schur: radio espectral {radius:.4f}")
        return self
