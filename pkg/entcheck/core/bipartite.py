"""
Criterio de sumas para estados bipartitos.

- `sum_criterion`: con Σc_ij ≠ 0, ψ es factorizado sii c_ij·Σc = (Σ_j c_ij)(Σ_i c_ij)
  para todo (i, j); los factores salen directamente de las sumas marginales.
- `vanishing_sum_criterion`: con Σc_ij = 0, basta un producto fila·columna no
  nulo para concluir entrelazamiento.
- Si además todos esos productos se anulan el caso es degenerado: cualquiera
  de los dos resultados es posible y el veredicto queda inconcluso.
- `sign_flip_recover` intenta salir del caso degenerado negando un único vector
  de base y repitiendo el criterio.
"""

from __future__ import annotations

import numpy as np

from entcheck.core import multipartite
from entcheck.core.tensor import (
    CoeffTensor,
    Tolerances,
    approx_eq_grid,
    negate_slice,
    partial_sums,
    sum_is_zero,
    total_sum,
    unit_scaled,
)
from entcheck.core.verdict import (
    Criterion,
    LocalFactors,
    Outcome,
    Verdict,
    first_violation,
    reconstruction_bound,
    reconstruction_residual,
)
from entcheck.errors import ArityError, ContractError
from entcheck.utils.logger import get_logger

log = get_logger("bipartite")

DEFAULT_TOLERANCES = Tolerances()


def _require_bipartite(t: CoeffTensor) -> None:
    if t.party_count != 2:
        raise ArityError("2", t.party_count)


def sum_criterion(t: CoeffTensor, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """
    Decide factorizado / entrelazado con la identidad de sumas fila-columna.

    - Suma total no nula: verifica la identidad en toda la grilla; la primera
      violación (orden lexicográfico) es el testigo.
    - Suma total nula: delega en la lógica de `vanishing_sum_criterion`.
    - Un veredicto factorizado se emite sólo si el producto exterior de los
      factores reproduce el tensor; si no (suma total mal condicionada) el
      resultado es inconcluso para que el pipeline escale.
    - Todo se evalúa sobre `unit_scaled(t)`: el veredicto no depende de la
      escala global y el testigo queda en unidades de max|c|.
    """
    _require_bipartite(t)
    u, scale = unit_scaled(t)
    c = u.entries
    total = total_sum(u)

    if sum_is_zero(u, total, tol):
        log.debug(f"suma total {abs(total):.3e}·max|c| ≈ 0: caso de suma nula")
        return _vanishing_sum(u, total, tol)

    rows = partial_sums(u, 1)
    cols = partial_sums(u, 2)
    lhs = c * total
    rhs = np.outer(rows, cols)

    mask = ~approx_eq_grid(lhs, rhs, tol)
    if mask.any():
        witness, violations = first_violation(mask, lhs, rhs, 1.0, "sum-identity")
        log.debug(f"identidad de sumas violada en {witness.index} (residuo {witness.residual:.3e})")
        return Verdict.entangled(Criterion.SUM, witness, violations)

    factors = LocalFactors((rows / total, cols))
    residual = reconstruction_residual(u, factors)
    if residual > reconstruction_bound(u, tol):
        log.warning(f"reconstrucción con residuo relativo {residual:.3e}: suma total mal condicionada")
        return Verdict.inconclusive(
            Criterion.SUM,
            reason="ill-conditioned",
            diagnostics={"reconstruction_residual": residual},
        )
    return Verdict.factorized(
        Criterion.SUM,
        factors.rescaled(scale),
        diagnostics={"reconstruction_residual": residual, "total_sum": total * scale},
    )


def _vanishing_sum(u: CoeffTensor, total: complex, tol: Tolerances) -> Verdict:
    # `u` ya está en unidades de max|c|
    rows = partial_sums(u, 1)
    cols = partial_sums(u, 2)
    products = np.outer(rows, cols)
    mask = np.abs(products) > tol.eps_mag
    if mask.any():
        lhs = u.entries * total
        witness, violations = first_violation(mask, lhs, products, 1.0, "vanishing-sum")
        return Verdict.entangled(Criterion.VANISHING_SUM, witness, violations)
    return Verdict.inconclusive(
        Criterion.DEGENERATE,
        reason="la suma total y todos los productos fila·columna se anulan",
        diagnostics={"total_sum": total},
    )


def vanishing_sum_criterion(t: CoeffTensor, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """Entrelazado si Σc = 0 y algún producto (Σ_j c_ij)(Σ_i c_ij) ≠ 0; si no, inconcluso."""
    _require_bipartite(t)
    u, _ = unit_scaled(t)
    total = total_sum(u)
    if not sum_is_zero(u, total, tol):
        raise ContractError(f"la suma total {total_sum(t)} no es nula")
    return _vanishing_sum(u, total, tol)


def extract_local_parts(t: CoeffTensor, tol: Tolerances = DEFAULT_TOLERANCES) -> LocalFactors:
    """a_i = (1/Σc)·Σ_j c_ij, b_j = Σ_i c_ij."""
    _require_bipartite(t)
    total = total_sum(t)
    if sum_is_zero(t, total, tol):
        raise ContractError("no se pueden extraer partes locales con suma total nula")
    return LocalFactors((partial_sums(t, 1) / total, partial_sums(t, 2)))


def equivalence_scalars(
    f1: LocalFactors,
    f2: LocalFactors,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[complex, ...] | None:
    """
    Escalares s_1..s_{r-1} con f2_k = s_k·f1_k y f2_r = f1_r / Π s_k.

    - Cada s_k se calcula en la primera coordenada donde f1_k no es nula
      (relativo a su módulo máximo) y luego se verifica en todas.
    - Devuelve None si las factorizaciones no son equivalentes.
    """
    if f1.dims != f2.dims:
        raise ContractError(f"dimensiones distintas: {f1.dims} vs {f2.dims}")

    scalars: list[complex] = []
    for v1, v2 in zip(f1.factors[:-1], f2.factors[:-1]):
        mags = np.abs(v1)
        pivot = int(np.argmax(mags > tol.eps_mag * mags.max()))
        s = complex(v2[pivot] / v1[pivot])
        if s == 0 or not np.all(approx_eq_grid(v2, s * v1, tol)):
            return None
        scalars.append(s)

    product = np.prod(scalars)
    if not np.all(approx_eq_grid(f2.factors[-1], f1.factors[-1] / product, tol)):
        return None
    return tuple(scalars)


def equivalence_scalar(
    f1: LocalFactors,
    f2: LocalFactors,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> complex | None:
    """El escalar a ≠ 0 con f2.a = a·f1.a y f2.b = f1.b / a, o None."""
    if f1.party_count != 2:
        raise ArityError("2", f1.party_count)
    scalars = equivalence_scalars(f1, f2, tol)
    return None if scalars is None else scalars[0]


def sign_flip_recover(t: CoeffTensor, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """
    Reintenta el criterio negando un único vector de base.

    - Recorre las filas y después las columnas (en general: parte por parte,
      índice por índice) y devuelve el primer veredicto concluyente.
    - Los factores se corrigen negando la coordenada invertida.
    - Para r ≥ 3 el criterio repetido es el multipartito.
    """
    total = total_sum(t)
    if not sum_is_zero(t, total, tol):
        raise ContractError("la suma total no es nula: no hay caso degenerado que recuperar")

    criterion = sum_criterion if t.party_count == 2 else multipartite.multipartite_criterion
    for party in range(1, t.party_count + 1):
        for index in range(t.dims[party - 1]):
            verdict = criterion(negate_slice(t, party, index), tol)
            if verdict.outcome is Outcome.INCONCLUSIVE:
                continue
            log.info(f"inversión de signo (parte {party}, índice {index}) → {verdict.outcome.value}")
            factors = verdict.factors.negate_coordinate(party, index) if verdict.factors else None
            return Verdict(
                outcome=verdict.outcome,
                decided_by=verdict.decided_by,
                factors=factors,
                witness=verdict.witness,
                violations=verdict.violations,
                flip=(party, index),
                diagnostics=verdict.diagnostics,
            )

    return Verdict.inconclusive(
        Criterion.DEGENERATE,
        reason="todas las inversiones de signo individuales siguen en el caso degenerado",
    )


