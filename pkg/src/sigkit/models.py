"""
Modelos de datos para señales muestreadas y matrices estructuradas.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from src.core.exceptions import DimensionError, ShapeError


def _frozen_array(values, ndim: int = 2) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if ndim == 2 and arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SignalSequence:
    """
    Secuencia de vectores φ(k₀+1), φ(k₀+2), … de dimensión q.

    Attributes:
        samples: Matriz (N, q); la fila i es la muestra φ(k₀+1+i)
        start_index: Índice k₀ (la primera muestra es φ(k₀+1))
    """
    samples: np.ndarray
    start_index: int = 0

    def __post_init__(self):
        arr = _frozen_array(self.samples)
        if arr.ndim != 2:
            raise ShapeError(f"samples debe ser 1-D o 2-D, recibido: ndim={arr.ndim}")
        if arr.shape[0] < 1:
            raise DimensionError("La secuencia debe tener al menos una muestra")
        if arr.shape[1] < 1:
            raise DimensionError("Las muestras deben tener dimensión q >= 1")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "start_index", int(self.start_index))

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def last_index(self) -> int:
        """Índice de la última muestra φ(k₀+N)."""
        return self.start_index + self.length

    def slice(self, start: int, stop: int | None = None) -> "SignalSequence":
        """Sub-secuencia por posición (0-based), conservando la indexación absoluta."""
        stop = self.length if stop is None else stop
        return SignalSequence(self.samples[start:stop], self.start_index + start)

    def __add__(self, other: "SignalSequence") -> "SignalSequence":
        if self.samples.shape != other.samples.shape:
            raise ShapeError(
                f"No se pueden sumar secuencias {self.samples.shape} y {other.samples.shape}"
            )
        return SignalSequence(self.samples + other.samples, self.start_index)


@dataclass(frozen=True, eq=False)
class StackedWindow:
    """Vector apilado φ_s(k) = [φ(k+1); …; φ(k+s)]."""
    entries: np.ndarray
    depth: int
    anchor: int

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries, ndim=1))


@dataclass(frozen=True, eq=False)
class HankelMatrix:
    """Matriz de Hankel H_s de profundidad s; columna j = φ_s(k₀+j−1)."""
    data: np.ndarray
    depth: int
    start_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def columns(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class BlockToeplitzSpec:
    """
    Descripción de una matriz Toeplitz por bloques T_{q,t}(G).

    El bloque (i, j) (1-based) de la matriz realizada es block_fn(offset_base + i − j).

    Attributes:
        block_fn: Offset entero → bloque G_k (todos con la misma forma)
        rows_blocks: Número de filas de bloques q
        cols_blocks: Número de columnas de bloques t
        offset_base: Offset l del bloque (1, 1)
    """
    block_fn: Callable[[int], np.ndarray]
    rows_blocks: int
    cols_blocks: int
    offset_base: int = 0
    name: str = field(default="", compare=False)

    @classmethod
    def from_blocks(
        cls,
        blocks: list[np.ndarray],
        rows_blocks: int,
        cols_blocks: int,
        offset_base: int = 0,
    ) -> "BlockToeplitzSpec":
        """
        Construye la especificación a partir de la lista [G_0, G_1, …].

        Los offsets negativos o más allá de la lista se completan con bloques nulos.
        """
        if not blocks:
            raise DimensionError("Se requiere al menos el bloque G_0")
        zero = np.zeros_like(np.atleast_2d(np.asarray(blocks[0], dtype=np.float64)))

        def block_fn(k: int) -> np.ndarray:
            if 0 <= k < len(blocks):
                return blocks[k]
            return zero

        return cls(block_fn, rows_blocks, cols_blocks, offset_base)
