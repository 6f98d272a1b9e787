"""Modelo de planta en JSON: {"A": [[...]], "B": ..., "C": ..., "D": ...}."""

import json
from pathlib import Path

from src.core.exceptions import DataError
from src.ltisim.models import StateSpaceModel


def model_from_dict(payload: dict) -> StateSpaceModel:
    try:
        return StateSpaceModel(payload["A"], payload["B"], payload["C"], payload.get("D"))
    except KeyError as e:
        raise DataError(f"Falta la matriz {e} en el modelo") from e


def load_model(path: str | Path) -> StateSpaceModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"No se pudo leer el modelo {path}: {e}") from e
    return model_from_dict(payload)


def dumps_model(model: StateSpaceModel) -> str:
    return json.dumps(model.to_dict(), indent=2, sort_keys=True) + "\n"
