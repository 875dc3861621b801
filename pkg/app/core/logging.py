import logging
import sys

from app.core.config import get_settings

settings = get_settings()

def setup_logging(level: str | None = None) -> None:
    root_logger = logging.getLogger()

    if root_logger.hasHandlers():
        if level is not None:
            root_logger.setLevel(level.upper())
        return # already configured (reload/tests)

    # stdout carries tables and reports, diagnostics go to stderr
    handler = logging.StreamHandler(sys.stderr)
    formatter = logging.Formatter(
        fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    handler.setFormatter(formatter)

    root_logger.addHandler(handler)
    root_logger.setLevel((level or settings.LOGGING_LEVEL).upper())


def get_logger(name: str) -> logging.Logger:
    setup_logging()
    return logging.getLogger(name)
