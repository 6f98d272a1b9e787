"""Configuración de logging para la CLI."""

import logging

from src.core.config import settings

_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"


def configure_logging(level: str | None = None, quiet: bool = False) -> None:
    """
    Configura el logger raíz una sola vez por proceso.

    Args:
        level: Nivel de logging (default: settings.LOG_LEVEL)
        quiet: Si True, sólo se muestran warnings y errores
    """
    resolved = "WARNING" if quiet else (level or settings.LOG_LEVEL)
    logging.basicConfig(level=resolved.upper(), format=_FORMAT, force=True)
