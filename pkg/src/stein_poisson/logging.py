"""Logging configuration for stein_poisson.

This module provides a centralized logging setup with:
- Plain console lines for humans running the CLI
- Structured JSON file output, one object per line, for experiment audit trails
- A run-context filter that stamps experiment name, config hash and master
  seed onto every record while an experiment is running

Library modules only ever call :func:`get_logger`; handlers are installed by
the CLI (or by the caller) through :func:`setup_logging`.
"""

import json
import logging
import os
import sys
from datetime import UTC, datetime
from pathlib import Path
from typing import Any, Literal

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def log_fields(**fields: Any) -> dict[str, Any]:
    """Wrap structured fields for the ``extra=`` argument of a log call.

    Args:
        **fields: Key/value pairs written under ``"extra"`` in the JSON log.

    Returns:
        Mapping suitable for ``logger.info(msg, extra=log_fields(...))``.

    Examples:
        >>> log_fields(reps=1000, seed=7)
        {'extra_fields': {'reps': 1000, 'seed': 7}}
    """
    return {"extra_fields": fields}


class SimpleConsoleFormatter(logging.Formatter):
    """Console formatter: ``LEVEL: message``."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as a single console line.

        Args:
            record: The log record to format

        Returns:
            Formatted log string: "LEVEL: message"
        """
        return f"{record.levelname}: {record.getMessage()}"


class StructuredFileFormatter(logging.Formatter):
    """Structured JSON formatter for file output with ISO8601 timestamps."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON with ISO8601 timestamp.

        Args:
            record: The log record to format

        Returns:
            JSON-formatted log string with timestamp, level, message, run
            context (when present) and structured extra fields.
        """
        log_data: dict[str, Any] = {
            "timestamp": datetime.now(UTC).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        run_context = getattr(record, "run_context", None)
        if run_context:
            log_data["run"] = run_context

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        if hasattr(record, "extra_fields"):
            log_data["extra"] = record.extra_fields

        # numpy scalars and tuples of them show up in extra fields
        return json.dumps(log_data, default=_json_default)


def _json_default(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


class RunContextFilter(logging.Filter):
    """Attach experiment metadata to every record passing through a handler.

    Args:
        experiment: Experiment name.
        config_hash: Hash of the resolved experiment configuration.
        seed: Master seed of the run.
    """

    def __init__(self, experiment: str, config_hash: str, seed: int) -> None:
        super().__init__()
        self.context = {"experiment": experiment, "config_hash": config_hash, "seed": seed}

    def filter(self, record: logging.LogRecord) -> bool:
        """Stamp the run context on ``record``; never drops records."""
        record.run_context = self.context
        return True


def setup_logging(
    level: LogLevel | None = None,
    log_file: str | Path | None = None,
    console: bool = True,
) -> logging.Logger:
    """Configure logging for the application.

    Sets up logging with:
    - Simple console output on stderr (if enabled), so CSV or JSON written to
      stdout by the CLI stays clean
    - Structured JSON file output (if log_file specified)
    - ISO8601 timestamps for all file entries

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL).
               Defaults to WARNING, or DEBUG if DEBUG environment variable is set.
        log_file: Optional file path for structured JSON logging.
                  If provided, creates parent directories if needed.
        console: Enable console logging. Defaults to True.

    Returns:
        Configured root logger

    Examples:
        >>> setup_logging()
        <RootLogger root (WARNING)>
    """
    resolved_level: LogLevel = (
        level if level is not None else ("DEBUG" if os.getenv("DEBUG") else "WARNING")
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, resolved_level))
    root_logger.handlers.clear()

    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, resolved_level))
        console_handler.setFormatter(SimpleConsoleFormatter())
        root_logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setLevel(getattr(logging, resolved_level))
        file_handler.setFormatter(StructuredFileFormatter())
        root_logger.addHandler(file_handler)

    return root_logger


def install_run_context(filter_: RunContextFilter) -> None:
    """Add ``filter_`` to every handler currently on the root logger."""
    for handler in logging.getLogger().handlers:
        handler.addFilter(filter_)


def remove_run_context(filter_: RunContextFilter) -> None:
    """Undo :func:`install_run_context`."""
    for handler in logging.getLogger().handlers:
        handler.removeFilter(filter_)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for a module.

    Args:
        name: Logger name (typically __name__ of the module)

    Returns:
        Logger instance

    Examples:
        >>> logger = get_logger(__name__)
        >>> logger.debug("transport solved", extra=log_fields(support=(4, 9)))
    """
    return logging.getLogger(name)
