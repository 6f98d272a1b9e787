"""Ventanas apiladas y matrices de Hankel."""

import numpy as np

from src.core.exceptions import DimensionError, IndexRangeError
from src.sigkit.models import HankelMatrix, SignalSequence, StackedWindow


def stack_window(seq: SignalSequence, s: int, k: int) -> StackedWindow:
    """
    Construye φ_s(k) = [φ(k+1); …; φ(k+s)].

    Args:
        seq: Secuencia de vectores de dimensión q
        s: Profundidad de la ventana
        k: Ancla; la ventana cubre las muestras k+1..k+s

    Returns:
        StackedWindow de dimensión s·q

    Raises:
        DimensionError: Si s < 1
        IndexRangeError: Si la ventana sale del rango de la secuencia

    Example:
        >>> stack_window(SignalSequence([1, 2, 3, 4]), s=2, k=0).entries
        array([1., 2.])
    """
    if s < 1:
        raise DimensionError(f"s debe ser >= 1, recibido: {s}")
    first = k - seq.start_index
    if k < seq.start_index:
        raise IndexRangeError(
            f"Ventana fuera de rango: k+1={k + 1} < primer índice {seq.start_index + 1}"
        )
    if k + s > seq.last_index:
        raise IndexRangeError(
            f"Ventana fuera de rango: k+s={k + s} > último índice {seq.last_index}"
        )
    return StackedWindow(seq.samples[first:first + s].reshape(-1), depth=s, anchor=k)


def build_hankel(seq: SignalSequence, s: int) -> HankelMatrix:
    """
    Construye H_s con columnas φ_s(k₀), φ_s(k₀+1), …, φ_s(k₀+N−s).

    Args:
        seq: Secuencia de N vectores de dimensión q
        s: Profundidad (filas de bloques)

    Returns:
        HankelMatrix de forma (s·q, N−s+1)

    Raises:
        DimensionError: Si N < s o s < 1
    """
    if s < 1:
        raise DimensionError(f"s debe ser >= 1, recibido: {s}")
    if seq.length < s:
        raise DimensionError(f"N ({seq.length}) debe ser >= s ({s})")

    # (N−s+1, q, s) → (N−s+1, s, q): cada fila es la ventana aplanada muestra por muestra
    windows = np.lib.stride_tricks.sliding_window_view(seq.samples, s, axis=0)
    cols = windows.transpose(0, 2, 1).reshape(seq.length - s + 1, s * seq.dim)
    return HankelMatrix(np.ascontiguousarray(cols.T), depth=s, start_index=seq.start_index)
