"""Realización de matrices Toeplitz por bloques."""

import numpy as np

from src.core.exceptions import DimensionError, ShapeError
from src.sigkit.models import BlockToeplitzSpec


def realize_toeplitz(spec: BlockToeplitzSpec) -> np.ndarray:
    """
    Materializa T_{q,t}(G) con bloque (i, j) = G_{l+i−j}.

    Args:
        spec: Especificación con block_fn, número de bloques y offset base

    Returns:
        Matriz densa de q×t bloques

    Raises:
        DimensionError: Si q o t son < 1
        ShapeError: Si block_fn devuelve bloques de formas distintas
    """
    q, t, base = spec.rows_blocks, spec.cols_blocks, spec.offset_base
    if q < 1 or t < 1:
        raise DimensionError(f"Se requieren q, t >= 1, recibido: q={q}, t={t}")

    offsets = range(base + 1 - t, base + q)
    blocks = {k: np.atleast_2d(np.asarray(spec.block_fn(k), dtype=np.float64)) for k in offsets}
    shapes = {b.shape for b in blocks.values()}
    if len(shapes) != 1:
        raise ShapeError(f"Bloques con formas inconsistentes: {sorted(shapes)}")
    rb, cb = shapes.pop()

    out = np.empty((q * rb, t * cb), dtype=np.float64)
    for i in range(q):
        for j in range(t):
            out[i * rb:(i + 1) * rb, j * cb:(j + 1) * cb] = blocks[base + i - j]
    return out
