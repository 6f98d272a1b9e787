"""Manifiesto de ejecución: eco de la configuración, versión, semilla y checksums."""

from dataclasses import dataclass, field
from datetime import datetime, timezone

from src import __version__
from src.core.hashing import checksums
from src.io.report import dumps_json
from src.storage.base import StorageBackend

MANIFEST_SUFFIX = ".manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    """
    Único artefacto con timestamps; el resto de los archivos es byte-determinista.
    """
    command: str
    config: dict
    seed: int
    tool_version: str = __version__
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    files: dict[str, str] = field(default_factory=dict)
    seeds: dict[str, int] = field(default_factory=dict)

    def finish(self, paths: list[str]) -> "RunManifest":
        self.files = checksums(paths)
        self.finished_at = _now()
        return self

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "seeds": self.seeds,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "files": self.files,
            "config": self.config,
        }

    def save(self, storage: StorageBackend) -> str:
        return storage.save_text(dumps_json(self.to_dict()), f"{self.command}{MANIFEST_SUFFIX}")
