"""Serialización JSON del detector entrenado (sin timestamps, claves ordenadas)."""

import json

from src.core.exceptions import DataError
from src.detect.models import Detector, DetectorMeta
from src.io.matrices import decode_matrix, encode_matrix

FORMAT = "fsfd-detector"
VERSION = 1


def detector_to_dict(det: Detector) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "mode": det.mode,
        "meta": det.meta.to_dict(),
        "U2": encode_matrix(det.U2),
        "delta_hat": encode_matrix(det.delta_hat),
        "cov_inv_factor": encode_matrix(det.cov_inv_factor),
        "threshold": det.threshold,
    }


def detector_from_dict(payload: dict) -> Detector:
    """
    Raises:
        DataError: Formato o versión desconocidos, o campos faltantes
    """
    if payload.get("format") != FORMAT or payload.get("version") != VERSION:
        raise DataError(
            f"Formato de detector no soportado: {payload.get('format')} v{payload.get('version')}"
        )
    try:
        meta = DetectorMeta(**payload["meta"])
        return Detector(
            U2=decode_matrix(payload["U2"]),
            delta_hat=decode_matrix(payload["delta_hat"]),
            cov_inv_factor=decode_matrix(payload["cov_inv_factor"]),
            threshold=float(payload["threshold"]),
            mode=payload["mode"],
            meta=meta,
        )
    except (KeyError, TypeError) as e:
        raise DataError(f"Archivo de detector incompleto: {e}") from e


def dumps_detector(det: Detector) -> str:
    return json.dumps(detector_to_dict(det), indent=2, sort_keys=True) + "\n"


def loads_detector(text: str) -> Detector:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"JSON de detector inválido: {e}") from e
    return detector_from_dict(payload)
