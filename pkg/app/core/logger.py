import sys

from loguru import logger

from app.core.config import settings


def setup_logging(level: str | None = None):
    # Удаляем стандартный обработчик, чтобы не дублировалось
    logger.remove()

    # Добавляем наш настроенный обработчик
    logger.add(
        sys.stderr,
        level=level or settings.LOG_LEVEL,
        format=settings.LOG_FORMAT,
        colorize=settings.LOG_COLORIZE,
    )
