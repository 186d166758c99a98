"""
Centralised logging setup.
Console output goes to stderr so CLI reports on stdout stay machine-readable.
"""

import logging
import sys
from typing import Optional

from core import config

_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
_DATEFMT = "%Y-%m-%d %H:%M:%S"


def get_logger(name: str) -> logging.Logger:
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    logger.setLevel(getattr(logging, config.LOG_LEVEL, logging.INFO))
    fmt = logging.Formatter(_FORMAT, datefmt=_DATEFMT)

    # Console handler
    ch = logging.StreamHandler(sys.stderr)
    ch.setFormatter(fmt)
    logger.addHandler(ch)

    # File handler
    if config.LOG_FILE:
        try:
            fh = logging.FileHandler(config.LOG_FILE, encoding="utf-8")
            fh.setFormatter(fmt)
            logger.addHandler(fh)
        except Exception:
            pass  # Non-fatal if file write fails

    return logger


def set_level(level: Optional[str]) -> None:
    """Re-level every logger created through get_logger (used by cli -v)."""
    lvl = getattr(logging, (level or config.LOG_LEVEL).upper(), logging.INFO)
    for name in list(logging.root.manager.loggerDict):
        logger = logging.getLogger(name)
        if logger.handlers:
            logger.setLevel(lvl)
