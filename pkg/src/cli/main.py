"""
Punto de entrada de la CLI `fsfd`.

Uso:
    fsfd simulate --config experimento.json
    fsfd train --config experimento.json --seed 7
    fsfd detect --config experimento.json --detector out/detector.json
    fsfd verify --quiet
    fsfd bench --config experimento.json --out resultados/
"""

import argparse
import logging
import sys
from pathlib import Path

from src.cli.commands import RunContext, cmd_bench, cmd_detect, cmd_simulate, cmd_train, cmd_verify
from src.cli.config import load_config
from src.core.exceptions import FsfdError, exit_code_for
from src.core.logging import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=str, default=None, help="Archivo JSON de experimento")
    common.add_argument("--seed", type=int, default=None, help="Sobrescribe la semilla de la configuración")
    common.add_argument("--out", "-o", type=str, default=None, help="Directorio de salida")
    common.add_argument("--quiet", "-q", action="store_true", help="Sólo warnings y errores")

    parser = argparse.ArgumentParser(
        prog="fsfd",
        description="Representaciones imagen/núcleo de muestra finita y detección de fallas",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Códigos de salida:
  0 - éxito
  2 - entrada o configuración inválida
  3 - fallo numérico
  4 - algún chequeo de verificación falló
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="Simula trayectorias de entrenamiento y prueba")
    train = sub.add_parser("train", parents=[common], help="Entrena el detector con datos nominales")
    train.add_argument("--signals", type=str, default=None, help="CSV de entrenamiento")
    detect = sub.add_parser("detect", parents=[common], help="Evalúa el detector sobre señales de prueba")
    detect.add_argument("--detector", type=str, default=None, help="JSON del detector")
    detect.add_argument("--signals", type=str, default=None, help="CSV de prueba")
    sub.add_parser("verify", parents=[common], help="Suite de verificación de identidades")
    sub.add_parser("bench", parents=[common], help="Compara proyección, paridad y LS")
    return parser


def dispatch(args: argparse.Namespace) -> None:
    config, base_dir = load_config(args.config, seed=args.seed)
    out_dir = Path(args.out or config.outputs.directory)
    ctx = RunContext(config=config, base_dir=base_dir, out_dir=out_dir, quiet=args.quiet)

    if args.command == "simulate":
        cmd_simulate(ctx)
    elif args.command == "train":
        cmd_train(ctx, signals_path=args.signals)
    elif args.command == "detect":
        cmd_detect(ctx, detector_path=args.detector, signals_path=args.signals)
    elif args.command == "verify":
        cmd_verify(ctx)
    elif args.command == "bench":
        cmd_bench(ctx)


def main(argv: list[str] | None = None) -> int:
    """Ejecuta la CLI y retorna el código de salida."""
    args = build_parser().parse_args(argv)
    configure_logging(quiet=args.quiet)
    try:
        dispatch(args)
    except FsfdError as e:
        print(f"Error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except Exception as e:
        logger.exception("Error inesperado")
        print(f"Error inesperado: {e}", file=sys.stderr)
        return exit_code_for(e)
    return 0


def run() -> None:
    sys.exit(main())
