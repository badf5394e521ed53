"""
Contenedores de coeficientes y aritmética compartida por todos los criterios.

- `CoeffTensor` guarda el arreglo denso c_{j1...jr} (complex128, orden row-major)
  y es inmutable: el arreglo interno queda con `writeable=False`.
- `Tolerances` agrupa las tres tolerancias que gobiernan toda comparación aproximada.
- Las partes se numeran desde 1 (como en la notación habitual H_1 ⊗ ... ⊗ H_r);
  los índices de base dentro de cada parte se numeran desde 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from entcheck.config import Settings, settings
from entcheck.errors import ArityError, ContractError, IndexRangeError, InvalidTensorError, ToleranceError

TWO_PI = 2.0 * math.pi

# Los valores complejos son `complex` de Python; se documenta el alias por claridad
ComplexValue = complex


class Tolerances(BaseModel):
    """Tolerancias relativas de magnitud, angular (radianes) y de rango."""

    model_config = ConfigDict(frozen=True)

    eps_mag: float = Field(default=1e-9, gt=0)
    eps_ang: float = Field(default=1e-9, gt=0, lt=math.pi)
    eps_rank: float = Field(default=1e-10, gt=0)

    @classmethod
    def from_settings(cls, source: Settings | None = None, **overrides: float | None) -> "Tolerances":
        """
        Construye las tolerancias desde la configuración (.env / ENTCHECK_*).

        - `overrides` con valor None se ignoran (flags de CLI no provistos).
        - Los valores inválidos se reportan como `ToleranceError`.
        """
        source = source or settings
        values = {
            "eps_mag": source.TOL_MAG,
            "eps_ang": source.TOL_ANG,
            "eps_rank": source.TOL_RANK,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ToleranceError(str(e)) from e


@dataclass(frozen=True, eq=False)
class CoeffTensor:
    """Tensor denso de coeficientes de un vector de H_1 ⊗ ... ⊗ H_r, r ≥ 2."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        if arr.ndim < 2:
            raise InvalidTensorError(f"se requieren al menos 2 partes, forma recibida {arr.shape}")
        if any(d < 1 for d in arr.shape):
            raise InvalidTensorError(f"dimensiones inválidas {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidTensorError("el tensor contiene valores no finitos")
        if not np.any(arr != 0):
            raise InvalidTensorError("el tensor nulo no representa un estado")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_array(cls, array: Iterable) -> "CoeffTensor":
        return cls(np.asarray(array, dtype=np.complex128))

    @classmethod
    def from_flat(cls, dims: Sequence[int], values: Sequence[complex]) -> "CoeffTensor":
        """Arma el tensor desde una lista plana en orden row-major."""
        dims = tuple(int(d) for d in dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise InvalidTensorError(f"dimensiones inválidas {dims}")
        flat = np.asarray(values, dtype=np.complex128).ravel()
        if flat.size != math.prod(dims):
            raise InvalidTensorError(
                f"product(dims)={math.prod(dims)} no coincide con {flat.size} entradas"
            )
        return cls(flat.reshape(dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.entries.shape)

    @property
    def party_count(self) -> int:
        return self.entries.ndim

    @property
    def size(self) -> int:
        return int(self.entries.size)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))

    @property
    def norm(self) -> float:
        # Se escala antes de elevar al cuadrado: evita overflow con |c| ~ 1e160
        m = self.max_abs
        return m * float(np.linalg.norm(self.entries.ravel() / m))

    def matrix(self) -> np.ndarray:
        """Vista matricial c_ij; sólo para r = 2."""
        if self.party_count != 2:
            raise ArityError("2", self.party_count)
        return self.entries


def unit_scaled(t: CoeffTensor) -> tuple[CoeffTensor, float]:
    """
    Copia de `t` dividida por max|c|, junto con el factor de escala.

    - Todas las identidades de los criterios son homogéneas en c: deciden lo
      mismo sobre la copia, cuyo módulo máximo es 1.
    - Los factores obtenidos sobre la copia se devuelven a la escala original
      multiplicando el último de ellos por `scale`.
    """
    scale = t.max_abs
    return CoeffTensor(t.entries / scale), scale


def arg(z: complex) -> float:
    """Argumento en [0, 2π). arg(0) no está definido."""
    z = complex(z)
    if z == 0:
        raise ContractError("arg(0) no está definido")
    a = math.atan2(z.imag, z.real) % TWO_PI
    # -0.0 y residuos minúsculos negativos pueden redondear a 2π
    return 0.0 if a >= TWO_PI else a


def total_sum(t: CoeffTensor) -> complex:
    """
    Σ de todas las entradas, acumulada en orden row-major.

    - Orden de acumulación fijo: el resultado es idéntico bit a bit entre corridas.
    - No normaliza; los criterios la calculan sobre `unit_scaled(t)`.
    """
    acc = 0j
    for value in t.entries.ravel().tolist():
        acc += value
    return acc


def _check_party(t: CoeffTensor, party: int) -> None:
    if not 1 <= party <= t.party_count:
        raise IndexRangeError(f"parte {party} fuera de rango 1..{t.party_count}")


def partial_sums(t: CoeffTensor, party: int) -> np.ndarray:
    """Vector de sumas marginales de la parte `party` (una por índice de base)."""
    _check_party(t, party)
    axes = tuple(k for k in range(t.party_count) if k != party - 1)
    return t.entries.sum(axis=axes)


def partial_sum(t: CoeffTensor, party: int, index: int) -> complex:
    """Suma de las entradas cuyo índice k-ésimo vale `index`."""
    _check_party(t, party)
    if not 0 <= index < t.dims[party - 1]:
        raise IndexRangeError(
            f"índice {index} fuera de rango 0..{t.dims[party - 1] - 1} para la parte {party}"
        )
    return complex(np.take(t.entries, index, axis=party - 1).sum())


def approx_eq(x: complex, y: complex, tol: Tolerances) -> bool:
    """
    |x − y| ≤ eps_mag·max(1, |x|, |y|).

    - Relativa para valores grandes, absoluta (eps_mag) cerca de 0.
    - El piso de 1 supone valores ya expresados en unidades de max|c|;
      los criterios comparan sobre `unit_scaled(t)`.
    """
    x, y = complex(x), complex(y)
    return abs(x - y) <= tol.eps_mag * max(1.0, abs(x), abs(y))


def approx_eq_grid(x: np.ndarray, y: np.ndarray, tol: Tolerances) -> np.ndarray:
    """`approx_eq` entrada por entrada; devuelve la máscara de coincidencias."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    bound = tol.eps_mag * np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
    return np.abs(x - y) <= bound


def negate_slice(t: CoeffTensor, party: int, index: int) -> CoeffTensor:
    """
    Reemplaza el vector de base `index` de la parte `party` por su opuesto.

    - Equivale a negar la fila (party=1) o la columna (party=2) de c_ij.
    - El vector representado es el mismo; sólo cambia la base de expansión.
    """
    _check_party(t, party)
    if not 0 <= index < t.dims[party - 1]:
        raise IndexRangeError(f"índice {index} fuera de rango para la parte {party}")
    flipped = np.array(t.entries)
    selector = [slice(None)] * t.party_count
    selector[party - 1] = index
    flipped[tuple(selector)] *= -1
    return CoeffTensor(flipped)


def sum_is_zero(t: CoeffTensor, total: complex, tol: Tolerances) -> bool:
    """|Σc| ≤ eps_mag·max|c|: la suma total se considera nula (umbral relativo a la escala)."""
    return abs(total) <= tol.eps_mag * t.max_abs
