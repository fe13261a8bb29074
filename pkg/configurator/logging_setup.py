"""
Logging configuration shared by the library, the CLI and the test-suite.

Console output goes through a colorlog handler and structlog renders the
key/value pairs. When LOG_DIR is set each module also gets its own log file.
"""

import os
import logging
from pathlib import Path
from typing import Optional

import colorlog
import structlog

_VALID_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _log_level() -> str:
    log_level = os.environ.get("LOG_LEVEL", "INFO").upper()
    if log_level not in _VALID_LEVELS:
        log_level = "INFO"
    return log_level


class LoggerManager:
    """Central logging setup: structlog rendering on top of colorlog handlers"""

    _configured = False

    @classmethod
    def setup_logging(cls) -> structlog.stdlib.BoundLogger:
        """Configure and return a structured, colourised logger"""
        if not cls._configured:
            handler = colorlog.StreamHandler()
            handler.setFormatter(colorlog.ColoredFormatter(
                '%(log_color)s%(message)s',
                log_colors={
                    'DEBUG':    'cyan',
                    'INFO':     'green',
                    'WARNING':  'yellow',
                    'ERROR':    'red',
                    'CRITICAL': 'bold_red',
                }
            ))
            logging.basicConfig(level=getattr(logging, _log_level()), handlers=[handler])

            structlog.configure(
                processors=[
                    structlog.stdlib.add_log_level,
                    structlog.processors.StackInfoRenderer(),
                    structlog.processors.format_exc_info,
                    structlog.dev.ConsoleRenderer(colors=True),
                ],
                logger_factory=structlog.stdlib.LoggerFactory(),
                wrapper_class=structlog.stdlib.BoundLogger,
                cache_logger_on_first_use=True,
            )
            cls._configured = True

        return structlog.get_logger("configurator")


def get_module_logger(module_name: str, log_dir: Optional[str] = None) -> structlog.stdlib.BoundLogger:
    """
    Create or fetch the logger of a module, with its own log file

    Args:
        module_name: Module name (e.g. 'planner', 'simulator', 'harness')
        log_dir: Directory for the log files, LOG_DIR by default

    Returns:
        Structured logger bound to the module
    """
    LoggerManager.setup_logging()
    logger_name = f"configurator.{module_name}"
    std_logger = logging.getLogger(logger_name)

    log_dir = log_dir or os.environ.get("LOG_DIR")
    if log_dir and not std_logger.handlers:
        path = Path(log_dir)
        path.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path / f"configurator_{module_name}.log")
        file_handler.setLevel(getattr(logging, _log_level()))
        file_handler.setFormatter(
            logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        )
        std_logger.addHandler(file_handler)

    return structlog.get_logger(logger_name)
