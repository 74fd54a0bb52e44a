"""
Logging configuration for the HLZeta workbench.
"""
import logging
import sys
from typing import Optional

import structlog

from hlzeta.core.config import settings


def setup_logger(
    name: str = "hlzeta",
    level: Optional[str] = None,
    log_file: Optional[str] = None,
    json_output: Optional[bool] = None,
) -> structlog.stdlib.BoundLogger:
    """
    Set up the application logger.

    structlog renders events through the standard logging handlers so that
    uvicorn and library loggers share the same sinks.

    Args:
        name: Logger name
        level: Log level
        log_file: Log file path
        json_output: Render JSON lines instead of console text

    Returns:
        Configured bound logger
    """
    # Use settings if not provided
    level = (level or settings.log_level).upper()
    log_file = log_file or settings.log_file
    json_output = settings.log_json if json_output is None else json_output

    shared_processors = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso"),
    ]

    structlog.configure(
        processors=shared_processors + [structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    renderer = (
        structlog.processors.JSONRenderer()
        if json_output
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared_processors,
        processors=[structlog.stdlib.ProcessorFormatter.remove_processors_meta, renderer],
    )

    std_logger = logging.getLogger(name)
    std_logger.setLevel(getattr(logging, level))
    std_logger.propagate = False

    # Clear existing handlers
    std_logger.handlers.clear()

    # Console handler (stderr keeps stdout free for report streams)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, level))
    console_handler.setFormatter(formatter)
    std_logger.addHandler(console_handler)

    # File handler
    if log_file:
        try:
            file_handler = logging.FileHandler(log_file, encoding="utf-8")
            file_handler.setLevel(getattr(logging, level))
            file_handler.setFormatter(formatter)
            std_logger.addHandler(file_handler)
        except OSError as e:
            std_logger.warning(f"Could not create file handler for {log_file}: {e}")

    return structlog.get_logger(name)


# Global logger instance
logger = setup_logger()
