"""Configuración centralizada del sistema."""

from pathlib import Path
from pydantic_settings import BaseSettings


BASE_DIR = Path(__file__).resolve().parent.parent.parent


class Settings(BaseSettings):
    # General
    ENV: str = "development"

    # Salidas de la CLI
    OUTPUT_DIR: str = str(BASE_DIR / "output")

    # Paralelismo de los bucles Monte-Carlo (variable de entorno FSFD_THREADS)
    FSFD_THREADS: int = 1

    # Álgebra lineal
    RANK_REL_TOL: float = 1e-10      # σ_i > tol·σ_max·max(dim)
    BASIS_TOL: float = 1e-10         # ‖UᵀU − I‖ para bases ortonormales
    IDENTITY_TOL: float = 1e-8       # residuo relativo de identidades de factorización

    # Estimación del orden por salto espectral
    SPECTRAL_GAP_FACTOR: float = 10.0

    # Síntesis de ganancias
    DEADBEAT_ATTEMPTS: int = 16
    NILPOTENT_TOL: float = 1e-8
    KALMAN_MAX_ITER: int = 10000
    KALMAN_TOL: float = 1e-12

    # Detección
    COV_RIDGE: float = 1e-8
    SVDD_TOL: float = 1e-6
    SVDD_MAX_UPDATES: int = 100000

    # Logging
    LOG_LEVEL: str = "INFO"

    model_config = {"env_file": ".env", "extra": "ignore"}


settings = Settings()
