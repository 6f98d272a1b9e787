"""Interfaz de almacenamiento de los artefactos de la CLI (señales, detectores, reportes)."""

from abc import ABC, abstractmethod

from src.core.exceptions import DataError


class StorageBackend(ABC):
    """
    Backend de artefactos de texto.

    Las implementaciones sólo proveen bytes; la codificación, la lectura de texto
    y el chequeo de existencia con mensaje accionable se resuelven aquí.
    """

    encoding = "utf-8"

    @abstractmethod
    def save(self, data: bytes, filename: str, folder: str = "") -> str:
        """Escribe `data` de forma atómica y retorna la ruta final."""
        ...

    @abstractmethod
    def read(self, path: str) -> bytes:
        ...

    @abstractmethod
    def exists(self, path: str) -> bool:
        ...

    def save_text(self, text: str, filename: str, folder: str = "") -> str:
        return self.save(text.encode(self.encoding), filename, folder)

    def read_text(self, path: str) -> str:
        """
        Raises:
            DataError: Si el archivo no es texto en la codificación del backend
        """
        try:
            return self.read(path).decode(self.encoding)
        except UnicodeDecodeError as e:
            raise DataError(f"{path} no es texto {self.encoding}: {e}") from e

    def require(self, path: str, hint: str) -> str:
        """Retorna `path` si existe; si no, DataError con la acción sugerida."""
        if not self.exists(path):
            raise DataError(f"No existe {path}; {hint}")
        return path
