"""
Pipeline de análisis con escalamiento.

Bipartito (r = 2), método auto:
    sumas → (caso degenerado) inversiones de signo → módulos y fases → oráculo
Multipartito (r ≥ 3), método auto:
    sumas multipartitas → (caso degenerado) inversiones de signo → oráculo

- El oráculo es la etapa terminal: el veredicto final nunca es inconcluso.
- Salvo que se desactive, el veredicto se contrasta contra el rango de los desplegados.
- Con un método forzado no hay escalamiento: un inconcluso se reporta tal cual.
"""

from __future__ import annotations

import time
from enum import Enum
from typing import Callable

from pydantic import BaseModel, ConfigDict, Field

from entcheck.core.bipartite import sign_flip_recover, sum_criterion
from entcheck.core.multipartite import multipartite_criterion
from entcheck.core.oracle import numeric_rank, oracle_verdict, unfold
from entcheck.core.phase import modulus_phase_criterion
from entcheck.core.tensor import CoeffTensor, Tolerances
from entcheck.core.verdict import Criterion, Verdict
from entcheck.errors import ArityError
from entcheck.services.report import (
    AnalysisReport,
    FactorsRecord,
    InputDigest,
    OracleRecord,
    StageRecord,
)
from entcheck.utils.logger import get_logger

log = get_logger("pipeline")


# Nombres descriptivos aceptados también en --method y ENTCHECK_DEFAULT_METHOD
METHOD_ALIASES = {"sum": "thm2", "phase": "thm4", "multi": "thm5"}


class Method(str, Enum):
    AUTO = "auto"
    SUM = "thm2"
    PHASE = "thm4"
    MULTI = "thm5"
    ORACLE = "oracle"

    @classmethod
    def _missing_(cls, value: object) -> "Method | None":
        alias = METHOD_ALIASES.get(str(value).lower())
        return cls(alias) if alias else None


# Nombre de etapa en la traza y en timings_ms
STAGE_SUM = Criterion.SUM.value
STAGE_SIGN_FLIP = "sign-flip"
STAGE_PHASE = Criterion.MODULUS_PHASE.value
STAGE_MULTI = Criterion.MULTIPARTITE_SUM.value
STAGE_ORACLE = Criterion.ORACLE.value


class AnalysisConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: Method = Method.AUTO
    tolerances: Tolerances = Field(default_factory=Tolerances)
    oracle_check: bool = True


class _Run:
    """Ejecuta etapas, registra traza y tiempos."""

    def __init__(self, t: CoeffTensor, tol: Tolerances, digest: str):
        self.t = t
        self.tol = tol
        self.digest = digest
        self.trace: list[StageRecord] = []
        self.timings: dict[str, float] = {}

    def stage(self, name: str, fn: Callable[[CoeffTensor, Tolerances], Verdict]) -> Verdict:
        trace_id = f"{self.digest}:{name}"
        log.info(f"[{trace_id}] → inicio")
        t0 = time.perf_counter()
        verdict = fn(self.t, self.tol)
        dt_ms = (time.perf_counter() - t0) * 1000
        self.timings[name] = dt_ms
        self.trace.append(StageRecord.of(name, verdict))
        log.info(f"[{trace_id}] ← {verdict.outcome.value} ({verdict.decided_by.value}) {dt_ms:.2f} ms")
        return verdict


def _auto(run: _Run) -> Verdict:
    bipartite = run.t.party_count == 2
    if bipartite:
        verdict = run.stage(STAGE_SUM, sum_criterion)
    else:
        verdict = run.stage(STAGE_MULTI, multipartite_criterion)

    if not verdict.is_conclusive and verdict.decided_by is Criterion.DEGENERATE:
        verdict = run.stage(STAGE_SIGN_FLIP, sign_flip_recover)
    if not verdict.is_conclusive and bipartite:
        verdict = run.stage(STAGE_PHASE, modulus_phase_criterion)
    if not verdict.is_conclusive:
        verdict = run.stage(STAGE_ORACLE, oracle_verdict)
    return verdict


def _forced(run: _Run, method: Method) -> Verdict:
    if method in (Method.SUM, Method.PHASE) and run.t.party_count != 2:
        raise ArityError("2", run.t.party_count)
    stages = {
        Method.SUM: (STAGE_SUM, sum_criterion),
        Method.PHASE: (STAGE_PHASE, modulus_phase_criterion),
        Method.MULTI: (STAGE_MULTI, multipartite_criterion),
        Method.ORACLE: (STAGE_ORACLE, oracle_verdict),
    }
    return run.stage(*stages[method])


def _oracle_check(run: _Run, verdict: Verdict) -> OracleRecord:
    t0 = time.perf_counter()
    ranks = [numeric_rank(unfold(run.t, k), run.tol) for k in range(1, run.t.party_count + 1)]
    run.timings["oracle-check"] = (time.perf_counter() - t0) * 1000
    factorized = all(r == 1 for r in ranks)
    # Un inconcluso (método forzado) no contradice al oráculo
    agrees = not verdict.is_conclusive or factorized == verdict.is_factorized
    if not agrees:
        log.error(
            f"[{run.digest}:oracle-check] desacuerdo: criterio {verdict.decided_by.value} → "
            f"{verdict.outcome.value}, rangos de los desplegados {ranks}"
        )
    return OracleRecord(factorized=factorized, ranks=ranks, agrees=agrees)


def analyze(t: CoeffTensor, config: AnalysisConfig | None = None) -> AnalysisReport:
    """
    Corre el pipeline sobre `t` y arma el reporte completo.

    - Con `method=auto` el veredicto final es siempre factorizado o entrelazado.
    - Los factores del reporte se normalizan; el escalar agregado se reporta aparte.
    """
    config = config or AnalysisConfig()
    tol = config.tolerances
    digest = InputDigest.of(t)
    run = _Run(t, tol, digest.short)

    t0 = time.perf_counter()
    if config.method is Method.AUTO:
        verdict = _auto(run)
    else:
        verdict = _forced(run, config.method)

    oracle = None
    if config.oracle_check:
        oracle = _oracle_check(run, verdict)
    run.timings["total"] = (time.perf_counter() - t0) * 1000

    factors = None
    if verdict.is_factorized:
        factors = FactorsRecord.of(t, verdict.factors, tol.eps_rank)

    return AnalysisReport(
        input_digest=digest,
        method=config.method.value,
        trace=run.trace,
        verdict=verdict.outcome.value,
        decided_by=verdict.decided_by.value,
        reason=verdict.reason,
        factors=factors,
        oracle=oracle,
        tolerances=tol,
        timings_ms=run.timings,
    )
