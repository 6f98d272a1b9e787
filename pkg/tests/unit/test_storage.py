"""Tests del almacenamiento local y del manifiesto de ejecución."""

import json

import pytest

from src.cli.manifest import RunManifest
from src.core.exceptions import DataError
from src.core.hashing import sha256_bytes, sha256_file
from src.storage.local import LocalStorage


@pytest.mark.unit
class TestLocalStorage:

    def test_save_and_read(self, tmp_path):
        storage = LocalStorage(str(tmp_path))
        path = storage.save_text("k,u1\n", "signals.csv", folder="run")
        assert path == str(tmp_path / "run" / "signals.csv")
        assert storage.read_text(path) == "k,u1\n"
        assert [p.name for p in (tmp_path / "run").iterdir()] == ["signals.csv"]

    def test_overwrite(self, tmp_path):
        storage = LocalStorage(str(tmp_path))
        storage.save(b"old", "a.txt")
        path = storage.save(b"new", "a.txt")
        assert storage.read(path) == b"new"

    def test_require(self, tmp_path):
        storage = LocalStorage(str(tmp_path))
        with pytest.raises(DataError, match="ejecute primero"):
            storage.require(str(tmp_path / "missing.csv"), "ejecute primero 'simulate'")
        with pytest.raises(DataError):
            storage.require(str(tmp_path), "es un directorio")

    def test_binary_content(self, tmp_path):
        storage = LocalStorage(str(tmp_path))
        path = storage.save(b"\xff\xfe\x00", "bad.csv")
        with pytest.raises(DataError):
            storage.read_text(path)

    def test_unreadable(self, tmp_path):
        with pytest.raises(DataError):
            LocalStorage(str(tmp_path)).read(str(tmp_path / "nope"))


@pytest.mark.unit
class TestRunManifest:

    def test_checksums(self, tmp_path):
        storage = LocalStorage(str(tmp_path))
        first = storage.save(b"abc", "b.csv")
        second = storage.save(b"xyz", "a.json")
        manifest = RunManifest(command="simulate", config={"window": 4}, seed=3, seeds={"verify": 1})
        path = manifest.finish([first, second]).save(storage)

        payload = json.loads(storage.read_text(path))
        assert path.endswith("simulate.manifest.json")
        assert list(payload["files"]) == ["a.json", "b.csv"]
        assert payload["files"]["b.csv"] == sha256_bytes(b"abc") == sha256_file(first)
        assert payload["config"] == {"window": 4}
        assert payload["finished_at"] is not None
