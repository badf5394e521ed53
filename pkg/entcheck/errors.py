"""
Jerarquía de errores de entcheck.

- Todas las operaciones de la librería lanzan subclases de `EntcheckError`.
- La CLI captura `EntcheckError` en el nivel superior y termina con código 2.
"""


class EntcheckError(Exception):
    """Error base de la librería."""


class InvalidTensorError(EntcheckError):
    """Tensor de coeficientes inválido (forma, tensor nulo, valores no finitos)."""


class ArityError(EntcheckError):
    """La operación no admite esa cantidad de partes."""

    def __init__(self, expected: str, got: int):
        super().__init__(f"se esperaban {expected} partes, se recibieron {got}")
        self.expected = expected
        self.got = got


class IndexRangeError(EntcheckError):
    """Índice de parte o de base fuera de rango."""


class ContractError(EntcheckError):
    """Se violó la precondición de una operación."""


class ToleranceError(EntcheckError):
    """Tolerancias inválidas."""


class StateFormatError(EntcheckError):
    """Error de parseo de un archivo de estado, con posición."""

    def __init__(self, message: str, line: int | None = None, field: str | int | None = None):
        where = []
        if line is not None:
            where.append(f"línea {line}")
        if field is not None:
            where.append(f"campo {field}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
