"""
Corpus de verificación cruzada: estados incluidos en `entcheck/corpus` más
familias generadas con semilla, todos pasados por `analyze` con el oráculo activo.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np
from tqdm import tqdm

from entcheck.core.oracle import random_product_state, random_state
from entcheck.core.tensor import CoeffTensor
from entcheck.services.pipeline import AnalysisConfig, analyze
from entcheck.services.report import AnalysisReport
from entcheck.services.state_io import load_state
from entcheck.utils.logger import get_logger

log = get_logger("corpus")

CORPUS_DIR = Path(__file__).resolve().parents[1] / "corpus"


@dataclass
class CorpusResult:
    checked: int = 0
    verdicts: dict[str, int] = field(default_factory=dict)
    disagreements: list[tuple[str, AnalysisReport]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def bundled_states(directory: Path = CORPUS_DIR) -> Iterator[tuple[str, CoeffTensor]]:
    for path in sorted(directory.iterdir()):
        if path.suffix in (".json", ".txt"):
            yield path.name, load_state(path)


def generated_states(size: int, seed: int) -> Iterator[tuple[str, CoeffTensor]]:
    """Cuatro familias de `size` estados: productos y aleatorios, bipartitos y tripartitos."""
    rng = np.random.default_rng(seed)
    families = (
        ("product-2", lambda dims, s: random_product_state(dims, s, zero_avoidance=True), 2, 1, 6),
        ("random-2", random_state, 2, 2, 6),
        ("product-3", lambda dims, s: random_product_state(dims, s, zero_avoidance=True), 3, 1, 3),
        ("random-3", random_state, 3, 2, 3),
    )
    for family, make, parties, low, high in families:
        for k in range(size):
            dims = tuple(int(d) for d in rng.integers(low, high + 1, size=parties))
            state_seed = int(rng.integers(2**32))
            yield f"{family}/{k}", make(dims, state_seed)


def run_corpus(
    size: int,
    seed: int = 0,
    config: AnalysisConfig | None = None,
    progress: bool = True,
) -> CorpusResult:
    config = config or AnalysisConfig()
    if not config.oracle_check:
        config = config.model_copy(update={"oracle_check": True})

    states = [*bundled_states(), *generated_states(size, seed)]
    result = CorpusResult()
    for name, t in tqdm(states, desc="corpus", unit="estado", disable=not progress):
        report = analyze(t, config)
        result.checked += 1
        result.verdicts[report.verdict] = result.verdicts.get(report.verdict, 0) + 1
        if report.disagreement:
            log.error(f"[{name}] el criterio y el oráculo no coinciden")
            result.disagreements.append((name, report))
    log.info(f"corpus: {result.checked} estados, {len(result.disagreements)} desacuerdos")
    return result
