"""Checksums de archivos emitidos por la CLI."""

import hashlib
from pathlib import Path


def sha256_bytes(data: bytes) -> str:
    """Retorna el digest SHA-256 de un bloque de bytes con prefijo de algoritmo."""
    return f"sha256={hashlib.sha256(data).hexdigest()}"


def sha256_file(path: str | Path, chunk_size: int = 1 << 16) -> str:
    """Calcula el SHA-256 de un archivo leyéndolo por bloques."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return f"sha256={digest.hexdigest()}"


def checksums(paths: list[str | Path]) -> dict[str, str]:
    """Mapa nombre de archivo → checksum, ordenado por nombre."""
    return {Path(p).name: sha256_file(p) for p in sorted(paths, key=lambda p: Path(p).name)}
