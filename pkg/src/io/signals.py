"""
Archivo de señales: tabla CSV con una fila por muestra.

Encabezado: k,u1..up,y1..ym,label. k es el índice absoluto de la muestra
(la primera fila es k₀+1) y los reales se escriben con %.17g.
"""

import csv
import io

import numpy as np

from src.core.exceptions import DataError
from src.ltisim.models import Trajectory
from src.sigkit.models import SignalSequence

FLOAT_FMT = "%.17g"


def signals_header(p: int, m: int) -> list[str]:
    return ["k", *(f"u{i}" for i in range(1, p + 1)), *(f"y{i}" for i in range(1, m + 1)), "label"]


def dumps_signals(traj: Trajectory) -> str:
    """Serializa la trayectoria (sin estados) a texto CSV determinista."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(signals_header(traj.p, traj.m))
    k0 = traj.u.start_index
    for i in range(traj.length):
        row = [str(k0 + 1 + i)]
        row.extend(FLOAT_FMT % value for value in traj.u.samples[i])
        row.extend(FLOAT_FMT % value for value in traj.y.samples[i])
        row.append("1" if traj.labels[i] else "0")
        writer.writerow(row)
    return buffer.getvalue()


def loads_signals(text: str) -> Trajectory:
    """
    Parsea un archivo de señales.

    Raises:
        DataError: Encabezado inválido, filas incompletas o índices no consecutivos
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataError("Archivo de señales vacío")
    header = rows[0]
    p = sum(1 for name in header if name.startswith("u"))
    m = sum(1 for name in header if name.startswith("y"))
    if p < 1 or m < 1 or header != signals_header(p, m):
        raise DataError(f"Encabezado de señales inválido: {header}")
    body = [row for row in rows[1:] if row]
    if not body:
        raise DataError("El archivo de señales no contiene muestras")
    try:
        table = np.array(body, dtype=np.float64)
    except ValueError as e:
        raise DataError(f"Filas de señales inválidas: {e}") from e
    if table.shape[1] != p + m + 2:
        raise DataError(f"Se esperaban {p + m + 2} columnas, recibido: {table.shape[1]}")

    k = table[:, 0].astype(np.int64)
    if np.any(np.diff(k) != 1):
        raise DataError("Los índices k deben ser consecutivos")
    start = int(k[0]) - 1
    return Trajectory(
        u=SignalSequence(table[:, 1 : 1 + p], start),
        y=SignalSequence(table[:, 1 + p : 1 + p + m], start),
        labels=table[:, -1] != 0,
    )
