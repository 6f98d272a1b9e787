"""
Configuración de experimentos de la CLI (archivo JSON validado con Pydantic).
"""

import json
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.config import settings
from src.core.exceptions import ConfigValidationError
from src.io.model import load_model, model_from_dict
from src.ltisim.models import FaultProfile, NoiseModel, StateSpaceModel
from src.ltisim.random_models import random_minimal_model

Matrix = list[list[float]]
FaultKind = Literal["none", "sensor_bias", "actuator_bias", "sensor_gain"]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RandomModelSpec(_Section):
    n: int = Field(default=2, ge=1, le=20, description="Orden del modelo")
    p: int = Field(default=1, ge=1, le=10, description="Número de entradas")
    m: int = Field(default=2, ge=1, le=10, description="Número de salidas")
    seed: int = Field(default=0, ge=0, description="Semilla del sorteo")


class ModelSpec(_Section):
    """Planta: matrices en línea, archivo JSON o modelo aleatorio (exactamente una fuente)."""
    A: Matrix | None = None
    B: Matrix | None = None
    C: Matrix | None = None
    D: Matrix | None = None
    path: str | None = Field(default=None, description="Archivo JSON con A, B, C, D")
    random: RandomModelSpec | None = None

    @model_validator(mode="after")
    def _one_source(self) -> "ModelSpec":
        inline = any(mat is not None for mat in (self.A, self.B, self.C))
        sources = sum([inline, self.path is not None, self.random is not None])
        if sources == 0:
            self.random = RandomModelSpec()
        elif sources > 1:
            raise ValueError("Use sólo una fuente de modelo: matrices, path o random")
        if inline and any(mat is None for mat in (self.A, self.B, self.C)):
            raise ValueError("Las matrices A, B y C son obligatorias en línea")
        return self

    def build(self, base_dir: Path | None = None) -> StateSpaceModel:
        if self.path is not None:
            path = Path(self.path)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            return load_model(path)
        if self.random is not None:
            spec = self.random
            rng = np.random.default_rng(spec.seed)
            return random_minimal_model(rng, spec.n, spec.p, spec.m)
        return model_from_dict({"A": self.A, "B": self.B, "C": self.C, "D": self.D})


class NoiseSpec(_Section):
    process_std: float = Field(default=0.1, ge=0.0, description="Desviación de ω")
    measurement_std: float = Field(default=0.1, ge=0.0, description="Desviación de v")
    Sigma_w: Matrix | None = None
    S_wv: Matrix | None = None
    Sigma_v: Matrix | None = None

    def build(self, n: int, m: int) -> NoiseModel | None:
        if self.Sigma_w is not None or self.Sigma_v is not None:
            if self.Sigma_w is None or self.Sigma_v is None:
                raise ConfigValidationError("Sigma_w y Sigma_v deben darse juntas", ["noise"])
            return NoiseModel(self.Sigma_w, self.S_wv, self.Sigma_v)
        if self.process_std == 0.0 and self.measurement_std == 0.0:
            return None
        return NoiseModel.isotropic(n, m, self.process_std, self.measurement_std)


class FaultSpec(_Section):
    kind: FaultKind = "sensor_bias"
    amplitude: float = Field(default=1.0, description="Sesgo o ganancia relativa")
    onset: int = Field(default=200, ge=0, description="Primera muestra con falla (0-based)")

    def build(self, p: int, m: int, amplitude: float | None = None, kind: FaultKind | None = None):
        kind = kind or self.kind
        amplitude = self.amplitude if amplitude is None else amplitude
        if kind == "none" or amplitude == 0.0:
            return None
        if kind == "sensor_bias":
            return FaultProfile.step(self.onset, sensor_bias=np.full(m, amplitude))
        if kind == "actuator_bias":
            return FaultProfile.step(self.onset, actuator_bias=np.full(p, amplitude))
        return FaultProfile.step(self.onset, sensor_gain=np.full(m, amplitude))


class OutputSpec(_Section):
    directory: str = Field(default=settings.OUTPUT_DIR)
    signals: str = "signals.csv"
    training_signals: str = "training.csv"
    detector: str = "detector.json"
    report: str = "report"
    verification: str = "verification.json"
    bench: str = "bench.csv"


class VerifySpec(_Section):
    random_models: int = Field(default=3, ge=0, le=1000)
    window_margin: int = Field(default=2, ge=1, le=10, description="s = n + window_margin")
    noise_std: float = Field(default=0.1, ge=0.0)


class BenchSpec(_Section):
    amplitudes: list[float] = Field(default_factory=lambda: [0.0, 1.0, 2.0, 4.0])
    trials: int = Field(default=5, ge=1, le=10000)
    rho: int = Field(default=2, ge=1, description="Profundidad pasada del estimador LS")
    fault_kind: FaultKind = "sensor_gain"


class ExperimentConfig(_Section):
    """
    Attributes:
        horizon: N de la trayectoria de prueba
        training_horizon: N de la trayectoria nominal de entrenamiento
        window: Profundidad s
        latent_margin: n usado para γ = sp + n, o "auto" (salto espectral)
    """
    model: ModelSpec = Field(default_factory=ModelSpec)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    fault: FaultSpec = Field(default_factory=FaultSpec)
    horizon: int = Field(default=400, ge=1)
    training_horizon: int = Field(default=1000, ge=1)
    window: int = Field(default=6, ge=1, le=200)
    latent_margin: int | Literal["auto"] = "auto"
    mode: Literal["chi2", "svdd"] = "chi2"
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    C: float = Field(default=0.05, gt=0.0, le=1.0)
    ridge: float = Field(default=settings.COV_RIDGE, ge=0.0)
    seed: int = Field(default=0, ge=0)
    input_std: float = Field(default=1.0, gt=0.0)
    outputs: OutputSpec = Field(default_factory=OutputSpec)
    verify: VerifySpec = Field(default_factory=VerifySpec)
    bench: BenchSpec = Field(default_factory=BenchSpec)

    @model_validator(mode="after")
    def _check_lengths(self) -> "ExperimentConfig":
        s = self.window
        for name in ("horizon", "training_horizon"):
            N = getattr(self, name)
            if N < s:
                raise ValueError(f"N ({name}={N}) debe ser >= s (window={s})")
        if isinstance(self.latent_margin, int) and self.latent_margin < 0:
            raise ValueError(f"latent_margin debe ser >= 0, recibido: {self.latent_margin}")
        if self.bench.rho >= s:
            raise ValueError(f"bench.rho ({self.bench.rho}) debe ser < s (window={s})")
        return self


def _field_paths(error: ValidationError) -> list[str]:
    return [".".join(str(part) for part in item["loc"]) or "<root>" for item in error.errors()]


def parse_config(payload: dict) -> ExperimentConfig:
    """
    Valida un diccionario de configuración.

    Raises:
        ConfigValidationError: Con las rutas de los campos inválidos
    """
    try:
        return ExperimentConfig.model_validate(payload)
    except ValidationError as e:
        fields = _field_paths(e)
        details = "; ".join(
            f"{path}: {item['msg']}" for path, item in zip(fields, e.errors())
        )
        raise ConfigValidationError(f"Configuración inválida: {details}", fields) from e


def load_config(path: str | Path | None, seed: int | None = None) -> tuple[ExperimentConfig, Path]:
    """
    Lee y valida la configuración; --seed sobrescribe el campo seed.

    Returns:
        (config, directorio base para rutas relativas)
    """
    if path is None:
        payload: dict = {}
        base_dir = Path.cwd()
    else:
        path = Path(path)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigValidationError(f"No se pudo leer la configuración {path}: {e}", ["<file>"]) from e
        base_dir = path.parent
    if seed is not None:
        payload = {**payload, "seed": seed}
    return parse_config(payload), base_dir
