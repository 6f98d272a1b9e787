"""Finite-sample fault detection: representaciones imagen/kernel y detección por proyección."""

__version__ = "0.1.0"
