"""Generador de residuos basado en observador y variables latentes (v, r)."""

import numpy as np

from src.core.exceptions import ShapeError
from src.ltisim.models import StateSpaceModel, Trajectory
from src.sigkit.models import SignalSequence


def _run_observer(
    model: StateSpaceModel, L: np.ndarray, traj: Trajectory, xhat0
) -> tuple[np.ndarray, np.ndarray]:
    """Ejecuta x̂(k+1) = A_L x̂ + B_L u + L y; retorna (x̂, r) como matrices (N, n) y (N, m)."""
    if traj.p != model.p or traj.m != model.m:
        raise ShapeError(
            f"Trayectoria (p={traj.p}, m={traj.m}) incompatible con el modelo (p={model.p}, m={model.m})"
        )
    A_L, B_L = model.observer_matrices(L)
    L = np.atleast_2d(np.asarray(L, dtype=np.float64))
    xhat = np.zeros(model.n) if xhat0 is None else np.asarray(xhat0, dtype=np.float64).reshape(-1)
    if xhat.shape != (model.n,):
        raise ShapeError(f"x̂0 debe tener dimensión {model.n}, recibido: {xhat.shape}")

    u, y = traj.u.samples, traj.y.samples
    N = traj.length
    states = np.empty((N, model.n))
    r = np.empty((N, model.m))
    for k in range(N):
        states[k] = xhat
        r[k] = y[k] - model.C @ xhat - model.D @ u[k]
        xhat = A_L @ xhat + B_L @ u[k] + L @ y[k]
    return states, r


def observer_residual(
    model: StateSpaceModel,
    L: np.ndarray,
    traj: Trajectory,
    xhat0: np.ndarray | None = None,
) -> SignalSequence:
    """
    Residuo r = y − Cx̂ − Du del observador de Luenberger con ganancia L.

    Args:
        model: Planta nominal
        L: Ganancia n×m
        traj: Datos registrados
        xhat0: Estado inicial del observador (default: cero)

    Returns:
        SignalSequence m-dimensional alineada con la trayectoria
    """
    _, r = _run_observer(model, L, traj, xhat0)
    return SignalSequence(r, traj.u.start_index)


def latent_signals(
    model: StateSpaceModel,
    F: np.ndarray,
    L: np.ndarray,
    traj: Trajectory,
    xhat0: np.ndarray | None = None,
) -> tuple[SignalSequence, SignalSequence]:
    """
    Variables latentes del controlador basado en observador u = Fx̂ + v.

    Returns:
        (v, r) con v(k) = u(k) − F x̂(k) y r el residuo del mismo observador
    """
    F = np.atleast_2d(np.asarray(F, dtype=np.float64))
    if F.shape != (model.p, model.n):
        raise ShapeError(f"F debe ser {model.p}×{model.n}, recibido: {F.shape}")
    states, r = _run_observer(model, L, traj, xhat0)
    v = traj.u.samples - states @ F.T
    start = traj.u.start_index
    return SignalSequence(v, start), SignalSequence(r, start)
