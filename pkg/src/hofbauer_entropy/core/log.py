from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

PACKAGE_LOGGER = "hofbauer_entropy"


def configure_logging(verbose: int = 0, *, console: Console | None = None) -> logging.Logger:
    """Attach a single RichHandler to the package logger.

    - verbose=0 -> WARNING, 1 -> INFO, >=2 -> DEBUG
    - Safe to call repeatedly; the previous handler is replaced.
    """

    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG

    logger = logging.getLogger(PACKAGE_LOGGER)
    for h in list(logger.handlers):
        if getattr(h, "_hofbauer_entropy", False):
            logger.removeHandler(h)

    handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=False,
        rich_tracebacks=verbose >= 2,
    )
    handler._hofbauer_entropy = True  # type: ignore[attr-defined]
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger
