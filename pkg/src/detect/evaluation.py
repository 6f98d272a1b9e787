"""Evaluación de detectores sobre trayectorias: residuos, alarmas, FAR y MDR."""

import logging

import numpy as np

from src.core.exceptions import DimensionError, ShapeError
from src.detect.chi2 import batch_statistic
from src.detect.models import Detector, DetectionReport
from src.ltisim.models import Trajectory
from src.subspace.data_matrix import build_data_matrix

logger = logging.getLogger(__name__)


def residual_r_u2(det: Detector, window: np.ndarray) -> np.ndarray:
    """r_{U₂} = U2·[u_s; y_s]."""
    window = np.asarray(window, dtype=np.float64).reshape(-1)
    return det.residual(window)


def trajectory_windows(traj: Trajectory, depth: int) -> np.ndarray:
    """Ventanas [u; y] de paso 1 como columnas."""
    if traj.length < depth:
        raise DimensionError(f"La trayectoria ({traj.length}) es más corta que la ventana ({depth})")
    return build_data_matrix(traj, depth, check_width=False).T


def _rate(mask: np.ndarray) -> float | None:
    return float(mask.mean()) if mask.size else None


def run_detection(
    det: Detector,
    traj: Trajectory,
    config: dict | None = None,
    seeds: dict | None = None,
) -> DetectionReport:
    """
    Evalúa todas las ventanas de paso 1 y agrega FAR/MDR.

    Una ventana se etiqueta con falla si cubre alguna muestra posterior al onset.
    El retardo de detección es la última muestra de la primera ventana con falla
    que dispara alarma, menos el onset.

    Raises:
        ShapeError: Si las dimensiones no coinciden con el detector
        DimensionError: Si no cabe ninguna ventana
    """
    meta = det.meta
    if traj.p != meta.p or traj.m != meta.m:
        raise ShapeError(
            f"Señales (p={traj.p}, m={traj.m}) incompatibles con el detector (p={meta.p}, m={meta.m})"
        )
    depth = meta.s
    windows = trajectory_windows(traj, depth)
    statistics = batch_statistic(det, windows)
    alarms = statistics > det.threshold

    spans = np.lib.stride_tricks.sliding_window_view(traj.labels, depth)
    labels = spans.any(axis=1)
    settled = spans.all(axis=1)
    anchors = np.arange(labels.size)

    faulty = np.flatnonzero(traj.labels)
    onset = int(faulty[0]) if faulty.size else None
    delay = None
    hits = np.flatnonzero(labels & alarms)
    if onset is not None and hits.size:
        delay = int(hits[0] + depth - 1 - onset)

    report = DetectionReport(
        far=_rate(alarms[~labels]),
        mdr=_rate(~alarms[labels]),
        mdr_settled=_rate(~alarms[settled]),
        detection_delay=delay,
        anchors=anchors,
        statistics=statistics,
        alarms=alarms,
        labels=labels,
        threshold=det.threshold,
        onset=onset,
        config=config or {},
        seeds=seeds or {},
    )
    logger.info(
        "Detección: %d ventanas, FAR=%s, MDR=%s, retardo=%s",
        report.windows, report.far, report.mdr, report.detection_delay,
    )
    return report
