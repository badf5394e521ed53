"""
Reporte de análisis: documento JSON estable para stdout y tabla legible para --pretty.

- Los complejos se serializan como pares [re, im].
- Los tiempos viven sólo en `timings_ms`; el resto del reporte es determinista.
"""

from __future__ import annotations

import hashlib
from typing import Any, TextIO

import numpy as np
from colorama import Fore, Style
from pydantic import BaseModel, Field

from entcheck.core.tensor import CoeffTensor, Tolerances
from entcheck.core.verdict import LocalFactors, Outcome, Verdict, Witness

REPORT_VERSION = 1

ComplexPair = tuple[float, float]


def pair(z: complex) -> ComplexPair:
    z = complex(z)
    return (z.real, z.imag)


class InputDigest(BaseModel):
    dims: list[int]
    entry_count: int
    norm: float
    sha256: str

    @classmethod
    def of(cls, t: CoeffTensor) -> "InputDigest":
        return cls(
            dims=list(t.dims),
            entry_count=t.size,
            norm=t.norm,
            sha256=hashlib.sha256(t.entries.tobytes()).hexdigest(),
        )

    @property
    def short(self) -> str:
        return self.sha256[:8]


class WitnessRecord(BaseModel):
    index: list[int]
    lhs: ComplexPair
    rhs: ComplexPair
    residual: float
    scaled_residual: float
    condition: str

    @classmethod
    def of(cls, w: Witness) -> "WitnessRecord":
        return cls(
            index=list(w.index),
            lhs=pair(w.lhs),
            rhs=pair(w.rhs),
            residual=w.residual,
            scaled_residual=w.scaled_residual,
            condition=w.condition,
        )


def _plain(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return list(pair(value))
    if isinstance(value, (np.integer, np.floating)):
        return value.item()
    return value


class StageRecord(BaseModel):
    stage: str
    criterion: str
    outcome: str
    reason: str | None = None
    residual: float | None = None
    witness: WitnessRecord | None = None
    violation_count: int = 0
    flip: list[int] | None = None
    diagnostics: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def of(cls, stage: str, v: Verdict) -> "StageRecord":
        residual = v.witness.residual if v.witness else v.diagnostics.get("reconstruction_residual")
        return cls(
            stage=stage,
            criterion=v.decided_by.value,
            outcome=v.outcome.value,
            reason=v.reason,
            residual=None if residual is None else float(residual),
            witness=WitnessRecord.of(v.witness) if v.witness else None,
            violation_count=len(v.violations),
            flip=list(v.flip) if v.flip else None,
            diagnostics={k: _plain(x) for k, x in sorted(v.diagnostics.items())},
        )


class FactorsRecord(BaseModel):
    """Factores normalizados (norma 1, primera coordenada no nula con argumento 0) y el escalar agregado."""

    vectors: list[list[ComplexPair]]
    scalar: ComplexPair
    reconstruction_residual: float

    @classmethod
    def of(cls, t: CoeffTensor, factors: LocalFactors, cutoff: float) -> "FactorsRecord":
        unit, scalar = factors.normalized(cutoff)
        residual = float(np.max(np.abs(scalar * unit.outer() - t.entries)))
        return cls(
            vectors=[[pair(z) for z in v] for v in unit.factors],
            scalar=pair(scalar),
            reconstruction_residual=residual,
        )


class OracleRecord(BaseModel):
    factorized: bool
    ranks: list[int]
    agrees: bool


class AnalysisReport(BaseModel):
    report_version: int = REPORT_VERSION
    input_digest: InputDigest
    method: str
    trace: list[StageRecord]
    verdict: str
    decided_by: str
    reason: str | None = None
    factors: FactorsRecord | None = None
    oracle: OracleRecord | None = None
    tolerances: Tolerances
    timings_ms: dict[str, float] = Field(default_factory=dict)

    @property
    def disagreement(self) -> bool:
        return self.oracle is not None and not self.oracle.agrees

    def to_json(self, timings: bool = True) -> str:
        exclude = None if timings else {"timings_ms"}
        return self.model_dump_json(indent=2, exclude=exclude)


# --- tabla legible ---

_COLORS = {
    Outcome.FACTORIZED.value: Fore.GREEN,
    Outcome.ENTANGLED.value: Fore.RED,
    Outcome.INCONCLUSIVE.value: Fore.YELLOW,
}


def _colored(outcome: str) -> str:
    return f"{_COLORS.get(outcome, '')}{outcome}{Style.RESET_ALL}"


def _fmt_pair(p: ComplexPair) -> str:
    return f"{p[0]:.6g}{p[1]:+.6g}i"


def print_table(report: AnalysisReport, out: TextIO) -> None:
    d = report.input_digest
    print(f"estado   dims={'×'.join(map(str, d.dims))}  entradas={d.entry_count}  norma={d.norm:.6g}", file=out)
    print(f"{'etapa':<15}{'criterio':<18}{'resultado':<14}{'residuo':>12}  detalle", file=out)
    for s in report.trace:
        detail = s.reason or ""
        if s.witness:
            detail = f"testigo {tuple(s.witness.index)} ({s.witness.condition})"
        if s.flip:
            detail += f" inversión parte {s.flip[0]} índice {s.flip[1]}"
        residual = "" if s.residual is None else f"{s.residual:.3e}"
        ms = report.timings_ms.get(s.stage)
        timing = "" if ms is None else f" [{ms:.2f} ms]"
        # el color agrega caracteres invisibles: se rellena a mano
        pad = " " * max(0, 14 - len(s.outcome))
        print(f"{s.stage:<15}{s.criterion:<18}{_colored(s.outcome)}{pad}{residual:>12}  {detail}{timing}", file=out)
    print(f"veredicto: {_colored(report.verdict)} (decidido por {report.decided_by})", file=out)
    if report.factors:
        for k, v in enumerate(report.factors.vectors, start=1):
            print(f"  a^{k} = [{', '.join(_fmt_pair(p) for p in v)}]", file=out)
        print(f"  escalar = {_fmt_pair(report.factors.scalar)}", file=out)
    if report.oracle:
        status = f"{Fore.GREEN}coincide" if report.oracle.agrees else f"{Fore.RED}DESACUERDO"
        print(f"oráculo: rangos={report.oracle.ranks} {status}{Style.RESET_ALL}", file=out)
