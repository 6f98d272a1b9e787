"""
Simulación de trayectorias con incertidumbre de proceso/sensor y fallas inyectadas.
"""

import numpy as np

from src.core.exceptions import DimensionError, ParameterError, ShapeError
from src.ltisim.models import FaultProfile, NoiseModel, StateSpaceModel, Trajectory
from src.sigkit.models import SignalSequence


def _generator(seed: int) -> np.random.Generator:
    """Generador counter-based: la misma semilla reproduce los mismos bits."""
    return np.random.Generator(np.random.Philox(seed))


def gaussian_input(N: int, p: int, seed: int, scale: float = 1.0, start_index: int = 0) -> SignalSequence:
    """Excitación i.i.d. normal estándar escalada (persistentemente excitante casi seguro)."""
    if N < 1 or p < 1:
        raise DimensionError(f"Se requieren N, p >= 1, recibido: N={N}, p={p}")
    return SignalSequence(scale * _generator(seed).standard_normal((N, p)), start_index)


def _check_input(model: StateSpaceModel, u: SignalSequence, x0) -> np.ndarray:
    if u.dim != model.p:
        raise ShapeError(f"u tiene dimensión {u.dim}, el modelo espera p={model.p}")
    x = np.zeros(model.n) if x0 is None else np.asarray(x0, dtype=np.float64).reshape(-1)
    if x.shape != (model.n,):
        raise ShapeError(f"x0 debe tener dimensión {model.n}, recibido: {x.shape}")
    return x


def simulate(
    model: StateSpaceModel,
    u: SignalSequence,
    x0: np.ndarray | None = None,
    noise: NoiseModel | None = None,
    faults: FaultProfile | None = None,
    seed: int = 0,
) -> Trajectory:
    """
    Simula x(k+1) = Ax + B(u+f_a) + ω, y = Cx + D(u+f_a) + v + f_s.

    La u registrada excluye la falla de actuador. La falla multiplicativa de sensor
    suma g⊙y_nominal tras el onset. Los índices de falla son posiciones 0-based.

    Args:
        model: Planta
        u: Entrada registrada (p-dim)
        x0: Estado inicial (default: cero)
        noise: Covarianzas de ω y v (None = sin ruido)
        faults: Perfil de fallas (None = sin fallas)
        seed: Semilla del generador de ruido

    Returns:
        Trajectory con u, y, x y etiquetas (True desde el onset)

    Raises:
        ShapeError: Si las dimensiones no coinciden
    """
    x = _check_input(model, u, x0)
    N, n, m, p = u.length, model.n, model.m, model.p
    A, B, C, D = model.A, model.B, model.C, model.D

    if noise is not None:
        if noise.n != n or noise.m != m:
            raise ShapeError(f"Ruido ({noise.n}, {noise.m}) incompatible con modelo ({n}, {m})")
        z = _generator(seed).standard_normal((N, n + m))
        draws = z @ noise.sqrt_joint()
        w, v = draws[:, :n], draws[:, n:]
    else:
        w, v = np.zeros((N, n)), np.zeros((N, m))

    y = np.empty((N, m))
    states = np.empty((N, n))
    labels = np.zeros(N, dtype=bool)
    for k in range(N):
        u_plant = u.samples[k]
        if faults is not None:
            u_plant = u_plant + faults.actuator(k, p)
            labels[k] = faults.active(k)
        states[k] = x
        y_nominal = C @ x + D @ u_plant + v[k]
        y[k] = y_nominal
        if faults is not None:
            y[k] = y_nominal + faults.gain(k, m) * y_nominal + faults.sensor(k, m)
        x = A @ x + B @ u_plant + w[k]

    start = u.start_index
    return Trajectory(
        u=u,
        y=SignalSequence(y, start),
        labels=labels,
        x=SignalSequence(states, start),
    )


def simulate_innovation_model(
    model: StateSpaceModel,
    L: np.ndarray,
    Sigma_r: np.ndarray,
    u: SignalSequence,
    xhat0: np.ndarray | None = None,
    seed: int = 0,
    faults: FaultProfile | None = None,
) -> Trajectory:
    """
    Simula el modelo de innovaciones x̂(k+1) = Ax̂ + Bu + L r, y = Cx̂ + Du + r, r ~ N(0, Σ_r).

    La secuencia r es blanca por construcción; el estado registrado es x̂.
    """
    x = _check_input(model, u, xhat0)
    L = np.atleast_2d(np.asarray(L, dtype=np.float64))
    Sigma_r = np.atleast_2d(np.asarray(Sigma_r, dtype=np.float64))
    if L.shape != (model.n, model.m) or Sigma_r.shape != (model.m, model.m):
        raise ShapeError(f"L {L.shape} o Σ_r {Sigma_r.shape} incompatibles con el modelo")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (Sigma_r + Sigma_r.T))
    if eigvals[0] < -1e-12 * max(eigvals[-1], 1e-300):
        raise ParameterError("Σ_r debe ser semidefinida positiva")
    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T

    N, m, p = u.length, model.m, model.p
    r = _generator(seed).standard_normal((N, m)) @ root
    y = np.empty((N, m))
    states = np.empty((N, model.n))
    labels = np.zeros(N, dtype=bool)
    for k in range(N):
        u_plant = u.samples[k]
        if faults is not None:
            u_plant = u_plant + faults.actuator(k, p)
            labels[k] = faults.active(k)
        states[k] = x
        y_nominal = model.C @ x + model.D @ u_plant + r[k]
        y[k] = y_nominal
        if faults is not None:
            y[k] = y_nominal + faults.gain(k, m) * y_nominal + faults.sensor(k, m)
        x = model.A @ x + model.B @ u_plant + L @ r[k]

    return Trajectory(
        u=u,
        y=SignalSequence(y, u.start_index),
        labels=labels,
        x=SignalSequence(states, u.start_index),
    )
