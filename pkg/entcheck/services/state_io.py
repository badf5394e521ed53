"""
Lectura y escritura de archivos de estado.

Formato denso (JSON, UTF-8):

    {"dims": [2, 2], "entries": [[[1.0, 0.0], [-1.0, 0.0]], [[-1.0, 0.0], [1.0, 0.0]]]}

- Arreglos anidados en orden row-major; cada hoja es el par [re, im].

Formato disperso (texto, UTF-8):

    # comentario
    dims 2 2 2
    base 0
    0 0 0 1.0 0.0
    1 1 1 1.0 0.0

- Una línea por entrada no nula: índices, re, im. Las entradas omitidas valen 0.
- `base 1` indica índices desde 1 (estilo c_{11}); se convierten a base 0 al leer.

Los complejos siempre van como dos campos decimales separados: nunca "3+4i".
"""

from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from entcheck.core.tensor import CoeffTensor
from entcheck.errors import StateFormatError
from entcheck.utils.logger import get_logger

log = get_logger("state_io")


class StateFormat(str, Enum):
    DENSE = "dense"
    SPARSE = "sparse"


def infer_format(path: str | Path) -> StateFormat:
    return StateFormat.DENSE if Path(path).suffix.lower() == ".json" else StateFormat.SPARSE


def load_state(path: str | Path, format: StateFormat | str | None = None) -> CoeffTensor:
    """
    Lee y valida un archivo de estado.

    - Si no se indica `format`, se infiere de la extensión (.json → denso).
    - Los errores de parseo indican línea y campo.
    """
    fmt = StateFormat(format) if format else infer_format(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise StateFormatError(f"no se pudo leer {path}: {e}") from e
    log.info(f"leyendo {path} ({fmt.value}, {len(text)} bytes)")
    return parse_dense(text) if fmt is StateFormat.DENSE else parse_sparse(text)


# --- formato denso ---

def _parse_dims(raw: Any, line: int | None = None) -> tuple[int, ...]:
    if not isinstance(raw, list) or len(raw) < 2:
        raise StateFormatError("dims debe ser una lista con al menos 2 dimensiones", line, "dims")
    dims = []
    for k, d in enumerate(raw):
        if isinstance(d, bool) or not isinstance(d, int) or d < 1:
            raise StateFormatError(f"dimensión inválida {d!r}", line, f"dims[{k}]")
        dims.append(d)
    return tuple(dims)


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_dense(text: str) -> CoeffTensor:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFormatError(e.msg, e.lineno, f"columna {e.colno}") from e
    if not isinstance(doc, dict):
        raise StateFormatError("se esperaba un objeto con 'dims' y 'entries'")
    for key in ("dims", "entries"):
        if key not in doc:
            raise StateFormatError(f"falta la clave '{key}'", field=key)

    dims = _parse_dims(doc["dims"])
    values: list[complex] = []

    def walk(node: Any, depth: int, where: str) -> None:
        if depth == len(dims):
            if not (isinstance(node, list) and len(node) == 2 and all(_is_number(x) for x in node)):
                raise StateFormatError("cada coeficiente debe ser un par [re, im]", field=where)
            values.append(complex(float(node[0]), float(node[1])))
            return
        if not isinstance(node, list) or len(node) != dims[depth]:
            got = len(node) if isinstance(node, list) else type(node).__name__
            raise StateFormatError(
                f"se esperaban {dims[depth]} elementos en el nivel {depth}, hay {got}", field=where
            )
        for k, child in enumerate(node):
            walk(child, depth + 1, f"{where}[{k}]")

    walk(doc["entries"], 0, "entries")
    return CoeffTensor.from_flat(dims, values)


# --- formato disperso ---

def _parse_int(token: str, line: int, field: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise StateFormatError(f"entero inválido {token!r}", line, field) from None


def _parse_float(token: str, line: int, field: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise StateFormatError(f"número inválido {token!r}", line, field) from None
    if not math.isfinite(value):
        raise StateFormatError(f"valor no finito {token!r}", line, field)
    return value


def parse_sparse(text: str) -> CoeffTensor:
    dims: tuple[int, ...] | None = None
    base = 0
    records: dict[tuple[int, ...], complex] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        key = fields[0].lower()

        if key in ("dims", "base"):
            if records:
                raise StateFormatError(f"el encabezado '{key}' debe ir antes de las entradas", lineno, 1)
            if key == "dims":
                if dims is not None:
                    raise StateFormatError("encabezado 'dims' repetido", lineno, 1)
                dims = _parse_dims([_parse_int(tok, lineno, k) for k, tok in enumerate(fields[1:], start=2)], lineno)
            else:
                if len(fields) != 2 or fields[1] not in ("0", "1"):
                    raise StateFormatError("'base' debe ser 0 o 1", lineno, 2)
                base = int(fields[1])
            continue

        if dims is None:
            raise StateFormatError("falta el encabezado 'dims'", lineno, 1)
        if len(fields) != len(dims) + 2:
            raise StateFormatError(
                f"se esperaban {len(dims) + 2} campos (índices, re, im), hay {len(fields)}", lineno
            )

        written = tuple(_parse_int(tok, lineno, k) for k, tok in enumerate(fields[: len(dims)], start=1))
        index = tuple(j - base for j in written)
        for k, (j, d) in enumerate(zip(index, dims), start=1):
            if not 0 <= j < d:
                raise StateFormatError(f"índice {written[k - 1]} fuera de rango para la parte {k}", lineno, k)
        if index in records:
            raise StateFormatError(f"índice duplicado {written}", lineno)
        re = _parse_float(fields[-2], lineno, len(dims) + 1)
        im = _parse_float(fields[-1], lineno, len(dims) + 2)
        records[index] = complex(re, im)

    if dims is None:
        raise StateFormatError("falta el encabezado 'dims'")
    entries = np.zeros(dims, dtype=np.complex128)
    for index, value in records.items():
        entries[index] = value
    return CoeffTensor(entries)


# --- escritura ---

def _nested_pairs(node: Any) -> Any:
    if isinstance(node, list):
        return [_nested_pairs(child) for child in node]
    return [node.real, node.imag]


def dump_dense(t: CoeffTensor) -> str:
    doc = {"dims": list(t.dims), "entries": _nested_pairs(t.entries.tolist())}
    return json.dumps(doc) + "\n"


def dump_sparse(t: CoeffTensor) -> str:
    lines = ["dims " + " ".join(str(d) for d in t.dims), "base 0"]
    for index in zip(*np.nonzero(t.entries)):
        value = complex(t.entries[index])
        lines.append(" ".join([*(str(int(j)) for j in index), repr(value.real), repr(value.imag)]))
    return "\n".join(lines) + "\n"


def write_state(t: CoeffTensor, out: TextIO | str | Path, format: StateFormat | str = StateFormat.DENSE) -> None:
    """Escribe el tensor; los floats van con `repr`, así la lectura recupera los mismos bits."""
    text = dump_dense(t) if StateFormat(format) is StateFormat.DENSE else dump_sparse(t)
    if isinstance(out, (str, Path)):
        Path(out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
