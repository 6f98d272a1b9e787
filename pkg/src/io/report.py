"""Reporte de detección: CSV por ventana y resumen JSON."""

import csv
import io
import json

import numpy as np

from src.detect.models import DetectionReport
from src.io.signals import FLOAT_FMT


def dumps_report_csv(report: DetectionReport) -> str:
    """Filas k,J,alarm,label; k es la posición de la primera muestra de la ventana."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["k", "J", "alarm", "label"])
    for k, J, alarm, label in zip(report.anchors, report.statistics, report.alarms, report.labels):
        writer.writerow([int(k), FLOAT_FMT % J, int(alarm), int(label)])
    return buffer.getvalue()


def loads_report_csv(text: str) -> dict[str, np.ndarray]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return {
        "k": np.array([int(row["k"]) for row in rows], dtype=np.int64),
        "J": np.array([float(row["J"]) for row in rows]),
        "alarm": np.array([row["alarm"] == "1" for row in rows], dtype=bool),
        "label": np.array([row["label"] == "1" for row in rows], dtype=bool),
    }


def dumps_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def dumps_report_summary(report: DetectionReport) -> str:
    return dumps_json(report.summary())
