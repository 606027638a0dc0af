"""Structured logging setup for qst-bell.

Logs go to stderr: stdout is reserved for results so that reruns with the
same seed produce byte-identical output.
"""

from __future__ import annotations

import json
import logging
import sys
from typing import Literal


class ColorFormatter(logging.Formatter):
    """Colors WARNING lines yellow and ERROR and above red."""

    YELLOW = "\033[93m"
    RED = "\033[91m"
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        message = super().format(record)
        if record.levelno == logging.WARNING:
            return f"{self.YELLOW}{message}{self.RESET}"
        if record.levelno >= logging.ERROR:
            return f"{self.RED}{message}{self.RESET}"
        return message


class JsonLineFormatter(logging.Formatter):
    """One JSON object per record; messages are escaped with json.dumps."""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "timestamp": self.formatTime(record, "%Y-%m-%dT%H:%M:%S"),
            "level": record.levelname,
            "module": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload)


def setup_logging(
    level: str = "INFO",
    log_format: Literal["text", "json"] = "text",
) -> logging.Logger:
    """Configure and return the package logger.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL).
        log_format: "text" for human-readable lines, "json" for JSON lines.

    Returns:
        Configured logger for the qst_bell namespace.
    """
    numeric_level = getattr(logging, level.upper(), logging.INFO)
    logger = logging.getLogger("qst_bell")
    logger.setLevel(numeric_level)

    # Re-init must not stack handlers
    logger.handlers.clear()
    logger.propagate = False

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(numeric_level)

    if log_format == "json":
        handler.setFormatter(JsonLineFormatter())
    else:
        handler.setFormatter(
            ColorFormatter(
                "%(asctime)s [%(levelname)-8s] %(name)s: %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )

    logger.addHandler(handler)
    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a child logger under the qst_bell namespace.

    Args:
        name: Dotted module path below the package, e.g. "bell.seesaw".

    Returns:
        Logger instance.
    """
    return logging.getLogger(f"qst_bell.{name}")
