"""
Criterio general bipartito: condición de módulos + condición de fases.

- Paso 0: la matriz m×n se completa con filas o columnas nulas hasta d×d, d = max(m, n).
- Paso 1 (módulos): la identidad de sumas aplicada a |c_ij|. Su suma total es
  siempre positiva, así que no hay caso degenerado.
- Paso 2 (fases): existe c ∈ ℝ con
      Σ_j arg(c_ij) + Σ_i arg(c_ij) ≡ d·arg(c_ij) + c   (mod 2π)
  en toda entrada no nula. c se despeja de la entrada de mayor módulo.
- Paso 3 (reconstrucción): α_i = (1/d)Σ_j arg(c_ij) − c/d, β_j = (1/d)Σ_i arg(c_ij).
  Al dividir una identidad mod 2π por d cada ángulo queda definido sólo mod 2π/d,
  así que cada β_j se alinea contra la fila de referencia y cada α_i contra la
  columna de referencia; después se verifica α_i + β_j ≡ arg(c_ij) en cada entrada.

Las entradas con |c_ij| ≤ eps_rank·max|c| se excluyen de todas las sumas de
argumentos y de todas las verificaciones de fase (arg(0) no está definido).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from entcheck.core.bipartite import sum_criterion
from entcheck.core.tensor import TWO_PI, CoeffTensor, Tolerances, unit_scaled
from entcheck.core.verdict import (
    Criterion,
    LocalFactors,
    Outcome,
    Verdict,
    Witness,
    reconstruction_bound,
    reconstruction_residual,
)
from entcheck.errors import ArityError, ContractError
from entcheck.utils.logger import get_logger

log = get_logger("phase")

# Entradas a menos de este factor del corte usan una tolerancia angular relajada
NEAR_CUTOFF_FACTOR = 10.0
RELAXED_ANGLE_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class PhaseSolution:
    d: int
    c: float
    alpha: np.ndarray
    beta: np.ndarray
    mags_a: np.ndarray
    mags_b: np.ndarray
    # Representante real de c usado en la reconstrucción (c ≡ c_lift mod 2π)
    c_lift: float = 0.0


def circular_distance(x: float, y: float) -> float:
    """Distancia entre dos ángulos sobre el círculo, en [0, π]."""
    delta = (x - y) % TWO_PI
    return min(delta, TWO_PI - delta)


def _circular_distance_grid(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    delta = np.mod(x - y, TWO_PI)
    return np.minimum(delta, TWO_PI - delta)


def _wrap(angle: np.ndarray | float) -> np.ndarray | float:
    """Lleva un ángulo a (−π, π]."""
    return np.pi - np.mod(np.pi - angle, TWO_PI)


def _principal(angles: np.ndarray) -> np.ndarray:
    reduced = np.mod(angles, TWO_PI)
    # np.mod(-1e-17, 2π) redondea a 2π
    reduced[reduced >= TWO_PI] = 0.0
    return reduced


def principal_args(matrix: np.ndarray, cutoff: float) -> np.ndarray:
    """Argumentos en [0, 2π); NaN donde |c_ij| ≤ cutoff."""
    matrix = np.asarray(matrix)
    args = _principal(np.angle(matrix))
    args[np.abs(matrix) <= cutoff] = np.nan
    return args


def _pad(t: CoeffTensor) -> np.ndarray:
    m, n = t.dims
    d = max(m, n)
    padded = np.zeros((d, d), dtype=np.complex128)
    padded[:m, :n] = t.entries
    return padded


def _reference_entry(mods: np.ndarray) -> tuple[int, int]:
    # argmax devuelve la primera ocurrencia: desempate lexicográfico
    i, j = np.unravel_index(int(np.argmax(mods)), mods.shape)
    return int(i), int(j)


def _angle_tolerance(mods: np.ndarray, cutoff: float, tol: Tolerances) -> np.ndarray:
    return np.where(
        mods > NEAR_CUTOFF_FACTOR * cutoff,
        tol.eps_ang,
        RELAXED_ANGLE_FACTOR * tol.eps_ang,
    )


def _arg_sums(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.nansum(theta, axis=1), np.nansum(theta, axis=0)


def phase_constant(t: CoeffTensor, ref: tuple[int, int], tol: Tolerances = Tolerances()) -> float:
    """Despeja c (mod 2π) usando la entrada no nula `ref` como referencia."""
    if t.party_count != 2:
        raise ArityError("2", t.party_count)
    padded = _pad(t)
    cutoff = tol.eps_rank * t.max_abs
    theta = principal_args(padded, cutoff)
    i, j = ref
    if np.isnan(theta[i, j]):
        raise ContractError(f"la entrada {ref} es nula: arg no definido")
    rows, cols = _arg_sums(theta)
    return float((rows[i] + cols[j] - padded.shape[0] * theta[i, j]) % TWO_PI)


def _phase_witness(
    mask: np.ndarray,
    lhs: np.ndarray,
    rhs: np.ndarray,
    residuals: np.ndarray,
    condition: str,
) -> tuple[Witness, list[tuple[int, ...]]]:
    violations = [tuple(int(i) for i in idx) for idx in np.argwhere(mask)]
    idx = violations[0]
    witness = Witness(
        index=idx,
        lhs=complex(lhs[idx]),
        rhs=complex(rhs[idx]),
        residual=float(residuals[idx]),
        scaled_residual=float(residuals[idx]) / math.pi,
        condition=condition,
    )
    return witness, violations


def modulus_phase_criterion(t: CoeffTensor, tol: Tolerances = Tolerances()) -> Verdict:
    """
    Decide factorizado / entrelazado sin restricción sobre la suma total.

    - Paso 1 (módulos) decide entrelazamiento si |c_ij| no es de rango 1.
    - Paso 2 (fases) decide entrelazamiento cuando las entradas no nulas cubren
      toda la grilla d×d; con soporte parcial sus residuos quedan como diagnóstico.
    - Paso 3 construye los factores y verifica la identidad de fases entrada por entrada.
    """
    if t.party_count != 2:
        raise ArityError("2", t.party_count)
    m, n = t.dims
    u, scale = unit_scaled(t)
    padded = _pad(u)
    d = padded.shape[0]
    mods = np.abs(padded)

    # --- Paso 1: módulos ---
    magnitude = sum_criterion(CoeffTensor(mods), tol)
    if magnitude.is_entangled:
        witness = dataclasses.replace(magnitude.witness, condition="magnitude")
        log.debug(f"condición de módulos violada en {witness.index}")
        return Verdict.entangled(Criterion.MODULUS_PHASE, witness, magnitude.violations)

    total_mod = float(mods.sum())
    mags_a = mods.sum(axis=1) / total_mod
    mags_b = mods.sum(axis=0)

    # --- Paso 2: fases ---
    cutoff = tol.eps_rank
    support = mods > cutoff
    theta = principal_args(padded, cutoff)
    ang_tol = _angle_tolerance(mods, cutoff, tol)
    rows, cols = _arg_sums(theta)

    i_ref, j_ref = _reference_entry(mods)
    c_lift = float(rows[i_ref] + cols[j_ref] - d * theta[i_ref, j_ref])
    c = c_lift % TWO_PI

    lhs = rows[:, None] + cols[None, :]
    rhs = np.where(support, d * np.nan_to_num(theta) + c, 0.0)
    eq_residuals = np.where(support, _circular_distance_grid(lhs, rhs), 0.0)
    full_support = bool(support.all())
    diagnostics = {
        "full_support": full_support,
        "phase_constant": c,
        "max_phase_residual": float(eq_residuals.max()),
    }

    phase_mask = support & (eq_residuals > ang_tol)
    if phase_mask.any():
        if full_support:
            witness, violations = _phase_witness(phase_mask, lhs, rhs, eq_residuals, "phase")
            log.debug(f"condición de fases violada en {witness.index}")
            return Verdict.entangled(
                Criterion.MODULUS_PHASE, witness, violations, diagnostics=diagnostics
            )
        log.debug("soporte parcial: la condición de fases queda como diagnóstico")

    # --- Paso 3: reconstrucción ---
    alpha = rows / d - c_lift / d
    beta = cols / d
    support_rows = support[:, j_ref]
    support_cols = support[i_ref, :]
    beta_shift = np.where(support_cols, _wrap(theta[i_ref, :] - alpha[i_ref] - beta), 0.0)
    beta = beta + np.nan_to_num(beta_shift)
    alpha_shift = np.where(support_rows, _wrap(theta[:, j_ref] - alpha - beta[j_ref]), 0.0)
    alpha = alpha + np.nan_to_num(alpha_shift)
    if np.any(np.abs(beta_shift) > tol.eps_ang) or np.any(np.abs(alpha_shift) > tol.eps_ang):
        shift = float(max(np.abs(beta_shift).max(), np.abs(alpha_shift).max()))
        log.debug(f"ángulos realineados a otra rama (corrimiento máx. {shift:.3f} rad)")

    recon = alpha[:, None] + beta[None, :]
    align_residuals = np.where(support, _circular_distance_grid(recon, np.nan_to_num(theta)), 0.0)
    align_mask = support & (align_residuals > ang_tol)
    if align_mask.any():
        witness, violations = _phase_witness(
            align_mask, recon, np.nan_to_num(theta), align_residuals, "phase-alignment"
        )
        log.debug(f"identidad de fases violada en {witness.index}")
        return Verdict.entangled(
            Criterion.MODULUS_PHASE, witness, violations, diagnostics=diagnostics
        )

    solution = PhaseSolution(
        d=d,
        c=c,
        alpha=_principal(alpha[:m]),
        beta=_principal(beta[:n]),
        mags_a=mags_a[:m],
        mags_b=mags_b[:n],
        c_lift=c_lift,
    )
    factors = LocalFactors((
        solution.mags_a * np.exp(1j * solution.alpha),
        solution.mags_b * np.exp(1j * solution.beta),
    ))
    residual = reconstruction_residual(u, factors)
    diagnostics["reconstruction_residual"] = residual
    solution = dataclasses.replace(solution, mags_b=solution.mags_b * scale)
    if residual > reconstruction_bound(u, tol):
        log.warning(f"reconstrucción por módulos y fases con residuo relativo {residual:.3e}")
        return Verdict(
            Outcome.INCONCLUSIVE,
            Criterion.MODULUS_PHASE,
            reason="ill-conditioned",
            phase=solution,
            diagnostics=diagnostics,
        )
    return Verdict.factorized(
        Criterion.MODULUS_PHASE, factors.rescaled(scale), phase=solution, diagnostics=diagnostics
    )
