import logging
import sys

from entcheck.config import settings

# stderr: stdout queda reservado para el reporte
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING),
    format="%(asctime)s %(levelname)s %(name)s %(message)s",
    stream=sys.stderr,
)
get_logger = logging.getLogger


def set_level(level: int | str) -> None:
    """Cambia el nivel del logger raíz (usado por `--verbose`)."""
    logging.getLogger().setLevel(level)
