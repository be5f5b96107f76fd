import logging

from rich.console import Console
from rich.logging import RichHandler

LOGGER_NAME = "trajent"


def configure_logging(level: str | int = "WARNING") -> logging.Logger:
    """Attach a rich stderr handler to the package logger (once)."""
    log = logging.getLogger(LOGGER_NAME)
    log.setLevel(level.upper() if isinstance(level, str) else level)
    if not any(isinstance(h, RichHandler) for h in log.handlers):
        log.addHandler(
            RichHandler(console=Console(stderr=True), show_path=False)
        )
    log.propagate = False
    return log
