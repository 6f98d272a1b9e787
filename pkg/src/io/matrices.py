"""Codificación de matrices como {"shape": [...], "data": [...]} en orden fila-mayor."""

import numpy as np

from src.core.exceptions import DataError


def encode_matrix(values) -> dict:
    arr = np.asarray(values, dtype=np.float64)
    return {"shape": list(arr.shape), "data": arr.reshape(-1).tolist()}


def decode_matrix(payload: dict) -> np.ndarray:
    try:
        shape = tuple(int(dim) for dim in payload["shape"])
        data = np.asarray(payload["data"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"Matriz serializada inválida: {e}") from e
    if data.size != int(np.prod(shape)):
        raise DataError(f"La forma {shape} no coincide con {data.size} valores")
    return data.reshape(shape)
