"""
Punto de entrada de línea de comandos.

    python -m entcheck.cli analyze --input estado.json [--pretty]
    python -m entcheck.cli gen --product --dims 2,3 --seed 7 [--format sparse] [--output f]
    python -m entcheck.cli corpus [--size N] [--seed N]

Códigos de salida: 0 factorizado, 1 entrelazado, 2 error (incluye inconcluso con
método forzado y desacuerdo entre criterio y oráculo). `corpus` termina con 0
si no hubo desacuerdos y con 2 en otro caso.
"""

from __future__ import annotations

import argparse
import logging
import sys

from colorama import just_fix_windows_console

from entcheck.config import Settings
from entcheck.core.oracle import random_product_state, random_state
from entcheck.core.tensor import Tolerances
from entcheck.errors import EntcheckError
from entcheck.services.corpus import run_corpus
from entcheck.services.pipeline import METHOD_ALIASES, AnalysisConfig, Method, analyze
from entcheck.services.report import print_table
from entcheck.services.state_io import StateFormat, load_state, write_state
from entcheck.utils.logger import get_logger, set_level

log = get_logger("cli")

EXIT_FACTORIZED = 0
EXIT_ENTANGLED = 1
EXIT_ERROR = 2


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims inválidas: {text!r} (ej. 2,3,2)") from None
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"se requieren al menos 2 dimensiones positivas: {text!r}")
    return dims


def _config(args: argparse.Namespace, cfg: Settings) -> AnalysisConfig:
    tolerances = Tolerances.from_settings(
        cfg,
        eps_mag=args.tol_mag,
        eps_ang=args.tol_ang,
        eps_rank=args.tol_rank,
    )
    return AnalysisConfig(
        method=Method(args.method or cfg.DEFAULT_METHOD),
        tolerances=tolerances,
        oracle_check=cfg.ORACLE_CHECK and not args.no_oracle_check,
    )


def cmd_analyze(args: argparse.Namespace, cfg: Settings) -> int:
    t = load_state(args.input, args.format)
    report = analyze(t, _config(args, cfg))
    print(report.to_json())
    if args.pretty:
        print_table(report, sys.stderr)

    if report.disagreement:
        log.error(f"desacuerdo entre criterio y oráculo; volcado:\n{report.to_json()}")
        return EXIT_ERROR
    if report.verdict == "factorized":
        return EXIT_FACTORIZED
    if report.verdict == "entangled":
        return EXIT_ENTANGLED
    log.error(f"veredicto inconcluso ({report.decided_by}): {report.reason}")
    return EXIT_ERROR


def cmd_gen(args: argparse.Namespace, cfg: Settings) -> int:
    if args.product:
        t = random_product_state(args.dims, args.seed, zero_avoidance=args.zero_avoidance)
    else:
        t = random_state(args.dims, args.seed)
    write_state(t, args.output or sys.stdout, args.format)
    return 0


def cmd_corpus(args: argparse.Namespace, cfg: Settings) -> int:
    size = cfg.CORPUS_SIZE if args.size is None else args.size
    config = AnalysisConfig(tolerances=Tolerances.from_settings(cfg))
    result = run_corpus(size, args.seed, config, progress=not args.quiet)
    print(f"corpus: {result.checked} estados, veredictos {result.verdicts}, "
          f"{len(result.disagreements)} desacuerdos")
    for name, report in result.disagreements:
        print(f"--- {name}\n{report.to_json()}", file=sys.stderr)
    return 0 if result.ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entcheck",
        description="Decide si un vector de H_1 ⊗ ... ⊗ H_r es factorizado o entrelazado.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="logs DEBUG en stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analiza un archivo de estado")
    p.add_argument("--input", required=True, help="archivo de estado")
    p.add_argument("--format", choices=[f.value for f in StateFormat], default=None,
                   help="por defecto se infiere de la extensión (.json → dense)")
    p.add_argument("--method", choices=[*(m.value for m in Method), *METHOD_ALIASES], default=None,
                   help="auto escala entre criterios; thm2|thm4|thm5|oracle fuerzan una sola etapa "
                        "(alias: sum, phase, multi)")
    p.add_argument("--tol-mag", type=float, default=None)
    p.add_argument("--tol-ang", type=float, default=None)
    p.add_argument("--tol-rank", type=float, default=None)
    p.add_argument("--no-oracle-check", action="store_true")
    p.add_argument("--pretty", action="store_true", help="tabla legible en stderr")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gen", help="genera un estado aleatorio")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--product", action="store_true")
    kind.add_argument("--random", action="store_true")
    p.add_argument("--dims", type=_parse_dims, required=True, help="ej. 2,3,2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zero-avoidance", action="store_true")
    p.add_argument("--format", choices=[f.value for f in StateFormat], default=StateFormat.DENSE.value)
    p.add_argument("--output", default=None, help="por defecto stdout")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("corpus", help="verificación cruzada contra el oráculo")
    p.add_argument("--size", type=int, default=None, help="estados por familia generada")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true", help="sin barra de progreso")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_level(logging.DEBUG)
    just_fix_windows_console()
    # Settings se relee en cada invocación para respetar ENTCHECK_* del entorno
    cfg = Settings()
    try:
        return args.func(args, cfg)
    except EntcheckError as e:
        log.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR
    except Exception as e:
        log.exception(f"error inesperado: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
