"""
Criterio de sumas para r partes.

Con Σc ≠ 0, ψ es factorizado sii para toda tupla (j_1, ..., j_r)

    c_{j1...jr} · (Σc)^{r-1} = Π_k S_k(j_k)

donde S_k(j_k) es la suma marginal de la parte k. Los factores son
a^1 = S_1 / (Σc)^{r-1} y a^k = S_k para k ≥ 2.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from entcheck.core.tensor import (
    CoeffTensor,
    Tolerances,
    approx_eq_grid,
    partial_sums,
    sum_is_zero,
    total_sum,
    unit_scaled,
)
from entcheck.core.verdict import (
    Criterion,
    LocalFactors,
    Verdict,
    first_violation,
    reconstruction_bound,
    reconstruction_residual,
)
from entcheck.errors import ContractError
from entcheck.utils.logger import get_logger

log = get_logger("multipartite")


def multipartite_criterion(t: CoeffTensor, tol: Tolerances = Tolerances()) -> Verdict:
    """
    Decide factorizado / entrelazado para r ≥ 2 partes con las sumas marginales.

    - Suma total nula: inconcluso (`Eq2-degenerate`); no hay variante de suma nula
      para r ≥ 3 y el pipeline sigue con inversiones de signo y el oráculo.
    - Suma total no nula: verifica c·(Σc)^{r−1} = Π_k S_k(j_k) en cada tupla; el
      testigo es la primera violación en orden lexicográfico.
    - Con r = 2 coincide con `sum_criterion` (factores equivalentes por escalares).
    - Se evalúa sobre `unit_scaled(t)`, donde |(Σc)^{r−1}| ≤ (Π d_k)^{r−1}.
    - Los factorizados pasan por el control de reconstrucción; si falla el
      veredicto es inconcluso con razón `ill-conditioned`.
    """
    r = t.party_count
    u, scale = unit_scaled(t)
    total = total_sum(u)
    if sum_is_zero(u, total, tol):
        return Verdict.inconclusive(
            Criterion.DEGENERATE,
            reason="suma total nula",
            diagnostics={"total_sum": total},
        )

    power = total ** (r - 1)
    marginals = [partial_sums(u, k) for k in range(1, r + 1)]
    lhs = u.entries * power
    rhs = reduce(np.multiply.outer, marginals)

    norm = max(1.0, abs(power))
    mask = ~approx_eq_grid(lhs / norm, rhs / norm, tol)
    if mask.any():
        witness, violations = first_violation(mask, lhs, rhs, norm, "multipartite-sum")
        log.debug(f"identidad multipartita violada en {witness.index} (residuo {witness.residual:.3e})")
        return Verdict.entangled(Criterion.MULTIPARTITE_SUM, witness, violations)

    factors = LocalFactors((marginals[0] / power, *marginals[1:]))
    residual = reconstruction_residual(u, factors)
    if residual > reconstruction_bound(u, tol):
        log.warning(f"reconstrucción multipartita con residuo relativo {residual:.3e}")
        return Verdict.inconclusive(
            Criterion.MULTIPARTITE_SUM,
            reason="ill-conditioned",
            diagnostics={"reconstruction_residual": residual},
        )
    return Verdict.factorized(
        Criterion.MULTIPARTITE_SUM,
        factors.rescaled(scale),
        diagnostics={"reconstruction_residual": residual, "total_sum": total * scale},
    )


def reconstruct(f: LocalFactors, dims: Sequence[int] | None = None) -> CoeffTensor:
    """Producto exterior denso a^1 ⊗ ... ⊗ a^r."""
    if dims is not None and tuple(dims) != f.dims:
        raise ContractError(f"los factores tienen dimensiones {f.dims}, se esperaba {tuple(dims)}")
    return CoeffTensor(f.outer())
