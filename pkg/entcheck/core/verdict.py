"""
Resultados de los criterios: factores locales, testigos y veredictos.

- `Verdict` es tri-valuado (factorizado / entrelazado / inconcluso) y registra
  qué criterio decidió.
- Un veredicto factorizado siempre lleva `LocalFactors`; uno entrelazado siempre
  lleva un `Witness` con el índice violado y su residuo.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Any, Sequence

import numpy as np

from entcheck.core.tensor import CoeffTensor, Tolerances
from entcheck.errors import ContractError


class Outcome(str, Enum):
    FACTORIZED = "factorized"
    ENTANGLED = "entangled"
    INCONCLUSIVE = "inconclusive"


class Criterion(str, Enum):
    """Etiqueta `decided_by` del reporte; los valores son parte del formato JSON."""

    SUM = "Thm2"
    VANISHING_SUM = "Cor3"
    MODULUS_PHASE = "Thm4"
    MULTIPARTITE_SUM = "Thm5"
    ORACLE = "Oracle"
    DEGENERATE = "Eq2-degenerate"


@dataclass(frozen=True, eq=False)
class LocalFactors:
    """Un vector de coeficientes por parte; su producto exterior es el estado."""

    factors: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        vectors = []
        for k, v in enumerate(self.factors, start=1):
            arr = np.array(v, dtype=np.complex128, copy=True).ravel()
            if arr.size == 0 or not np.any(arr != 0):
                raise ContractError(f"el factor de la parte {k} es el vector nulo")
            arr.setflags(write=False)
            vectors.append(arr)
        if len(vectors) < 2:
            raise ContractError("se requieren al menos dos factores")
        object.__setattr__(self, "factors", tuple(vectors))

    @classmethod
    def of(cls, *vectors: Sequence[complex]) -> "LocalFactors":
        return cls(tuple(np.asarray(v, dtype=np.complex128) for v in vectors))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.factors)

    @property
    def party_count(self) -> int:
        return len(self.factors)

    def outer(self) -> np.ndarray:
        return reduce(np.multiply.outer, self.factors)

    def rescaled(self, scale: float) -> "LocalFactors":
        """Multiplica el último factor por `scale` (deshace `unit_scaled`)."""
        if scale == 1.0:
            return self
        return LocalFactors((*self.factors[:-1], self.factors[-1] * scale))

    def negate_coordinate(self, party: int, index: int) -> "LocalFactors":
        """Deshace una inversión de signo de base sobre los factores."""
        vectors = [np.array(v) for v in self.factors]
        vectors[party - 1][index] *= -1
        return LocalFactors(tuple(vectors))

    def normalized(self, cutoff: float = 1e-10) -> tuple["LocalFactors", complex]:
        """
        Normaliza cada factor a norma 1 con la primera coordenada no nula de argumento 0.

        - Devuelve (factores normalizados, escalar agregado) con
          escalar · ⊗(normalizados) = ⊗(originales).
        - `cutoff` es relativo al módulo máximo de cada factor.
        """
        scalar = 1 + 0j
        vectors = []
        for v in self.factors:
            mags = np.abs(v)
            top = float(mags.max())
            first = int(np.argmax(mags > cutoff * top))
            phase = v[first] / mags[first]
            n = top * float(np.linalg.norm(v / top))
            vectors.append(v / (n * phase))
            scalar *= n * phase
        return LocalFactors(tuple(vectors)), complex(scalar)


@dataclass(frozen=True)
class Witness:
    """Índice donde falla la identidad del criterio y sus dos lados."""

    index: tuple[int, ...]
    lhs: complex
    rhs: complex
    residual: float
    scaled_residual: float
    condition: str


@dataclass(frozen=True, eq=False)
class Verdict:
    outcome: Outcome
    decided_by: Criterion
    factors: LocalFactors | None = None
    witness: Witness | None = None
    violations: tuple[tuple[int, ...], ...] = ()
    reason: str | None = None
    # (parte, índice) de la inversión de signo de base que llevó al veredicto
    flip: tuple[int, int] | None = None
    phase: Any = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.outcome is Outcome.FACTORIZED and self.factors is None:
            raise ContractError("un veredicto factorizado requiere factores locales")
        if self.outcome is Outcome.ENTANGLED and self.witness is None:
            raise ContractError("un veredicto entrelazado requiere un testigo")

    @classmethod
    def factorized(cls, by: Criterion, factors: LocalFactors, **extra: Any) -> "Verdict":
        return cls(Outcome.FACTORIZED, by, factors=factors, **extra)

    @classmethod
    def entangled(cls, by: Criterion, witness: Witness, violations=(), **extra: Any) -> "Verdict":
        return cls(Outcome.ENTANGLED, by, witness=witness, violations=tuple(violations), **extra)

    @classmethod
    def inconclusive(cls, by: Criterion, reason: str, **extra: Any) -> "Verdict":
        return cls(Outcome.INCONCLUSIVE, by, reason=reason, **extra)

    @property
    def is_factorized(self) -> bool:
        return self.outcome is Outcome.FACTORIZED

    @property
    def is_entangled(self) -> bool:
        return self.outcome is Outcome.ENTANGLED

    @property
    def is_conclusive(self) -> bool:
        return self.outcome is not Outcome.INCONCLUSIVE


def reconstruction_residual(t: CoeffTensor, factors: LocalFactors) -> float:
    """max |⊗factores − c| entrada por entrada."""
    if factors.dims != t.dims:
        raise ContractError(f"dimensiones de factores {factors.dims} ≠ {t.dims}")
    return float(np.max(np.abs(factors.outer() - t.entries)))


def reconstruction_bound(t: CoeffTensor, tol: Tolerances) -> float:
    """Cota aceptada para `reconstruction_residual` en veredictos factorizados: 10·eps_mag·max|c|."""
    return 10.0 * tol.eps_mag * t.max_abs


def first_violation(
    mask: np.ndarray,
    lhs: np.ndarray,
    rhs: np.ndarray,
    scale: float,
    condition: str,
) -> tuple[Witness, list[tuple[int, ...]]]:
    """
    Elige el testigo: el primer índice violado en orden lexicográfico.

    - `mask` marca las entradas que NO satisfacen la identidad.
    - Devuelve el testigo y la lista completa de violaciones (también lexicográfica).
    """
    violations = [tuple(int(i) for i in idx) for idx in np.argwhere(mask)]
    idx = violations[0]
    left, right = complex(lhs[idx]), complex(rhs[idx])
    residual = abs(left - right)
    witness = Witness(
        index=idx,
        lhs=left,
        rhs=right,
        residual=residual,
        scaled_residual=residual / scale,
        condition=condition,
    )
    return witness, violations
