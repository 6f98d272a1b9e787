"""Ensamblado de bloques de Markov generalizados en matrices Toeplitz."""

import numpy as np

from src.ltisim.structure import matrix_powers
from src.sigkit.models import BlockToeplitzSpec
from src.sigkit.toeplitz import realize_toeplitz


def markov_sequence(
    head: np.ndarray, left: np.ndarray, dynamics: np.ndarray, right: np.ndarray, count: int
) -> list[np.ndarray]:
    """Bloques [head, left·right, left·M·right, …, left·M^{count−2}·right] (count bloques)."""
    blocks = [np.atleast_2d(np.asarray(head, dtype=np.float64))]
    if count > 1:
        blocks.extend(left @ Mk @ right for Mk in matrix_powers(dynamics, count - 2))
    return blocks


def toeplitz(blocks: list[np.ndarray], rows: int, cols: int, base: int) -> np.ndarray:
    return realize_toeplitz(BlockToeplitzSpec.from_blocks(blocks, rows, cols, base))
