"""
Oráculo de verificación por rango, independiente de los criterios de sumas y fases.

- Un tensor es producto completo sii todos sus desplegados (mode-k unfoldings)
  tienen rango 1; para r = 2 esto es rango de Schmidt 1.
- El rango se obtiene por eliminación gaussiana con pivoteo completo; la
  descomposición de Schmidt usa la SVD de numpy.
- Este módulo no importa ni reutiliza lógica de `bipartite`, `phase` ni
  `multipartite`: el acuerdo entre ambos caminos es la verificación.
- También contiene los generadores aleatorios (deterministas dada la semilla)
  usados por las pruebas y por `entcheck corpus`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from entcheck.core.tensor import CoeffTensor, Tolerances, unit_scaled
from entcheck.core.verdict import Criterion, LocalFactors, Verdict, Witness
from entcheck.errors import ArityError, ContractError, IndexRangeError
from entcheck.utils.logger import get_logger

log = get_logger("oracle")

MIN_FACTOR_MAGNITUDE = 0.1
MIN_TOTAL_SUM = 1e-6


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    values: np.ndarray
    left_vectors: tuple[np.ndarray, ...]
    right_vectors: tuple[np.ndarray, ...]

    @property
    def schmidt_rank(self) -> int:
        return int(self.values.size)

    def reconstruct(self) -> np.ndarray:
        return sum(
            lam * np.outer(phi, psi)
            for lam, phi, psi in zip(self.values, self.left_vectors, self.right_vectors)
        )


def unfold(t: CoeffTensor, party: int) -> np.ndarray:
    """Desplegado de la parte `party`: d_k × (Π d_l / d_k), columnas en orden row-major."""
    if not 1 <= party <= t.party_count:
        raise IndexRangeError(f"parte {party} fuera de rango 1..{t.party_count}")
    return np.moveaxis(t.entries, party - 1, 0).reshape(t.dims[party - 1], -1)


def numeric_rank(mat: np.ndarray, tol: Tolerances = Tolerances()) -> int:
    """
    Rango numérico por eliminación gaussiana con pivoteo completo.

    - En cada paso el pivote es la entrada de mayor módulo de la submatriz restante.
    - Se detiene cuando el pivote cae por debajo de eps_rank × (primer pivote),
      que es la entrada de mayor módulo de toda la matriz.
    """
    a = np.array(mat, dtype=np.complex128, copy=True)
    if a.ndim != 2:
        raise ContractError(f"se esperaba una matriz, forma {a.shape}")
    if not np.any(a != 0):
        raise ContractError("la matriz nula no tiene rango definido para el oráculo")

    m, n = a.shape
    rank = 0
    largest = None
    for k in range(min(m, n)):
        # Buscar el pivote en la submatriz restante
        sub = np.abs(a[k:, k:])
        nr, nc = divmod(int(np.argmax(sub)), n - k)
        pivot = sub[nr, nc]
        if largest is None:
            largest = pivot
        if pivot <= tol.eps_rank * largest:
            break
        # Intercambio de filas y de columnas
        a[[k, k + nr], :] = a[[k + nr, k], :]
        a[:, [k, k + nc]] = a[:, [k + nc, k]]
        # Eliminación hacia adelante
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
        rank += 1
    return rank


def oracle_factorized(t: CoeffTensor, tol: Tolerances = Tolerances()) -> bool:
    """
    True sii todos los desplegados tienen rango numérico 1.

    - No usa sumas ni argumentos, sólo eliminación gaussiana.
    - El corte de `numeric_rank` es relativo al primer pivote: la decisión es
      invariante ante c → λ·c.
    """
    return all(numeric_rank(unfold(t, k), tol) == 1 for k in range(1, t.party_count + 1))


def _fiber_factors(t: CoeffTensor) -> LocalFactors:
    # Fibras que pasan por la entrada de mayor módulo: c = f_1 ⊗ ... ⊗ f_r / c*^(r-1),
    # calculadas sobre c / max|c| (|c*| = 1) y reescaladas en el último factor
    u, scale = unit_scaled(t)
    pivot = np.unravel_index(int(np.argmax(np.abs(u.entries))), u.dims)
    fibers = []
    for k in range(u.party_count):
        selector = list(pivot)
        selector[k] = slice(None)
        fibers.append(np.array(u.entries[tuple(selector)]))
    fibers[0] = fibers[0] / u.entries[pivot] ** (u.party_count - 1)
    return LocalFactors(tuple(fibers)).rescaled(scale)


def oracle_verdict(t: CoeffTensor, tol: Tolerances = Tolerances()) -> Verdict:
    """El veredicto del oráculo; el testigo de entrelazamiento es la primera parte de rango ≥ 2."""
    for party in range(1, t.party_count + 1):
        mat = unfold(t, party)
        rank = numeric_rank(mat, tol)
        if rank >= 2:
            s = np.linalg.svd(mat / np.abs(mat).max(), compute_uv=False)
            ratio = float(s[1] / s[0])
            witness = Witness(
                index=(party,),
                lhs=complex(rank),
                rhs=1 + 0j,
                residual=float(s[1]),
                scaled_residual=ratio,
                condition="rank",
            )
            return Verdict.entangled(Criterion.ORACLE, witness, [(party,)], diagnostics={"rank": rank})
    return Verdict.factorized(Criterion.ORACLE, _fiber_factors(t), diagnostics={"rank": 1})


def schmidt(t: CoeffTensor, tol: Tolerances = Tolerances()) -> SchmidtForm:
    """Descomposición de Schmidt ψ = Σ λ_i φ_i ⊗ ψ_i vía SVD de c_ij."""
    if t.party_count != 2:
        raise ArityError("2", t.party_count)
    u, s, vh = np.linalg.svd(t.entries)
    keep = int(np.count_nonzero(s > tol.eps_rank * s[0]))
    return SchmidtForm(
        values=s[:keep],
        left_vectors=tuple(u[:, i] for i in range(keep)),
        right_vectors=tuple(vh[i, :] for i in range(keep)),
    )


def schmidt_tensor(form: SchmidtForm) -> CoeffTensor:
    """Coeficientes del mismo vector en las bases de Schmidt: diag(λ_1, ..., λ_r')."""
    return CoeffTensor(np.diag(form.values.astype(np.complex128)))


def _unit_disk(rng: np.random.Generator, size: int, zero_avoidance: bool) -> np.ndarray:
    # Uniforme en el disco: radio √U, ángulo 2πV
    def draw(k: int) -> np.ndarray:
        return np.sqrt(rng.random(k)) * np.exp(2j * math.pi * rng.random(k))

    values = draw(size)
    if zero_avoidance:
        small = np.abs(values) < MIN_FACTOR_MAGNITUDE
        while small.any():
            values[small] = draw(int(small.sum()))
            small = np.abs(values) < MIN_FACTOR_MAGNITUDE
    return values


def random_product_state(dims: Sequence[int], rng_seed: int, zero_avoidance: bool = False) -> CoeffTensor:
    """
    Producto exterior de vectores aleatorios con entradas uniformes en el disco unidad.

    - Con `zero_avoidance` se re-muestrean las entradas con módulo < 0.1 y los
      factores completos mientras |Σc| < 1e-6.
    """
    rng = np.random.default_rng(rng_seed)
    while True:
        factors = [_unit_disk(rng, int(d), zero_avoidance) for d in dims]
        entries = reduce(np.multiply.outer, factors)
        if not zero_avoidance or abs(entries.sum()) >= MIN_TOTAL_SUM:
            return CoeffTensor(entries)
        log.debug(f"suma total {abs(entries.sum()):.2e} < {MIN_TOTAL_SUM:.0e}: se re-muestrean los factores")


def random_state(dims: Sequence[int], rng_seed: int) -> CoeffTensor:
    """Entradas i.i.d. uniformes en el disco unidad (casi seguramente entrelazado)."""
    rng = np.random.default_rng(rng_seed)
    dims = tuple(int(d) for d in dims)
    return CoeffTensor(_unit_disk(rng, math.prod(dims), False).reshape(dims))
