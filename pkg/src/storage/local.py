"""Almacenamiento en sistema de archivos local con escritura atómica."""

import os
import tempfile
from pathlib import Path

from src.core.config import settings
from src.core.exceptions import DataError
from src.storage.base import StorageBackend


class LocalStorage(StorageBackend):
    """Backend en disco local; cada escritura va a un temporal y luego se renombra."""

    def __init__(self, base_path: str | None = None):
        self.base_path = Path(base_path or settings.OUTPUT_DIR)
        self.base_path.mkdir(parents=True, exist_ok=True)

    def _resolve(self, folder: str, filename: str) -> Path:
        path = self.base_path / folder / filename
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def save(self, data: bytes, filename: str, folder: str = "") -> str:
        path = self._resolve(folder, filename)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return str(path)

    def read(self, path: str) -> bytes:
        try:
            return Path(path).read_bytes()
        except OSError as e:
            raise DataError(f"No se pudo leer {path}: {e}") from e

    def exists(self, path: str) -> bool:
        return Path(path).is_file()
