"""Excepciones personalizadas del sistema."""


class FsfdError(Exception):
    """Excepción base del sistema."""

    exit_code = 3


# --- Errores de validación (código de salida 2) ---


class ValidationFailure(FsfdError):
    """Entrada que no cumple las precondiciones de una operación."""

    exit_code = 2


class DimensionError(ValidationFailure, ValueError):
    """Datos demasiado cortos o matriz vacía."""
    pass


class IndexRangeError(ValidationFailure, IndexError):
    """Ventana fuera del rango de la secuencia."""
    pass


class ShapeError(ValidationFailure, ValueError):
    """Dimensiones incompatibles entre matrices o señales."""
    pass


class ParameterError(ValidationFailure, ValueError):
    """Parámetro numérico fuera de rango."""
    pass


class DataError(ValidationFailure):
    """Datos de entrenamiento que no cumplen los requisitos del detector."""
    pass


class ModeError(ValidationFailure):
    """Estadístico pedido a un detector entrenado en otro modo."""
    pass


class ModelError(ValidationFailure):
    """Modelo no controlable, no observable o no mínimo."""
    pass


class EmptyKernelError(ValidationFailure):
    """El subespacio residual es vacío para la profundidad de ventana pedida."""
    pass


class BasisError(ValidationFailure):
    """Matriz que debía ser una base ortonormal y no lo es."""
    pass


class ConfigValidationError(ValidationFailure):
    """Configuración de experimento inválida."""

    def __init__(self, message: str, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = fields or []


# --- Errores numéricos (código de salida 3) ---


class NumericalError(FsfdError):
    """Fallo numérico durante un cálculo."""

    exit_code = 3


class SynthesisError(NumericalError):
    """La ganancia sintetizada no supera su certificado."""
    pass


class ConvergenceError(NumericalError):
    """Un método iterativo no convergió."""
    pass


class ConditioningError(NumericalError):
    """Matriz singular o mal condicionada."""
    pass


class DegenerateError(NumericalError):
    """Excitación o espectro degenerado."""
    pass


class ConstructionError(NumericalError):
    """Un certificado de rango de una construcción exacta falló (indica un bug)."""
    pass


class BoundViolationError(NumericalError):
    """Un gap medido supera una cota que debía cumplirse."""
    pass


# --- Verificación (código de salida 4) ---


class VerificationError(FsfdError):
    """Uno o más chequeos de la suite de verificación fallaron."""

    exit_code = 4

    def __init__(self, message: str, labels: list[str] | None = None):
        super().__init__(message)
        self.labels = labels or []


def exit_code_for(exc: BaseException | None) -> int:
    """Código de salida de la CLI para una excepción (0 si no hay error)."""
    if exc is None:
        return 0
    if isinstance(exc, FsfdError):
        return exc.exit_code
    return 1
