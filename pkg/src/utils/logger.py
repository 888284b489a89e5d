"""
Logging utilities for cm-scope.

Provides centralized logging configuration with optional rotating file
output and console output on stderr, so that stdout stays reserved for
analysis results.
"""

import functools
import logging
import logging.handlers
import os
import time
from typing import Optional

ROOT_LOGGER = "cm_scope"


def setup_logger(
    name: str = ROOT_LOGGER,
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    log_dir: str = "logs",
    max_file_size: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
    console_output: bool = True
) -> logging.Logger:
    """
    Set up a logger with file and console handlers.

    Args:
        name: Logger name
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Log file name inside log_dir; no file handler when None
        log_dir: Directory to store log files
        max_file_size: Maximum size of each log file before rotation
        backup_count: Number of backup files to keep
        console_output: Whether to also output to stderr

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, log_level.upper()))

    # Avoid duplicate handlers if logger already exists
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    if log_file:
        os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            os.path.join(log_dir, log_file),
            maxBytes=max_file_size,
            backupCount=backup_count
        )
        file_handler.setLevel(logging.DEBUG)  # File gets all levels
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    if console_output:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(getattr(logging, log_level.upper()))
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    return logger


def setup_application_logging(config: dict, verbose: bool = False, log_file: Optional[str] = None) -> logging.Logger:
    """
    Set up application-wide logging based on configuration.

    Every module logger lives below ``cm_scope`` or propagates to the root,
    so configuring the application logger once is enough.

    Args:
        config: Configuration dictionary with logging settings
        verbose: Force DEBUG level
        log_file: Overrides the configured log file
    """
    log_config = config.get('logging', {})
    level = "DEBUG" if verbose else log_config.get('level', 'INFO')
    logger = setup_logger(
        name=ROOT_LOGGER,
        log_level=level,
        log_file=log_file or log_config.get('file'),
        log_dir=log_config.get('dir', 'logs'),
        console_output=log_config.get('console', True)
    )
    # Package modules log under their own module names; route them here.
    for module in ("ingest", "image", "disasm", "cfg", "detectors", "secmodel", "report", "cli", "config"):
        child = logging.getLogger(module)
        child.setLevel(logger.level)
        child.handlers = list(logger.handlers)
        child.propagate = False
    return logger


class LoggerMixin:
    """
    Mixin class to add logging capability to any class.

    Usage:
        class FirmwareAnalyzer(LoggerMixin):
            def __init__(self):
                self.setup_logger()

            def run(self):
                self.logger.info("Something happened")
    """

    def setup_logger(self, component_name: Optional[str] = None):
        """Attach a module-scoped logger named after this class."""
        name = component_name or f"{self.__class__.__module__}.{self.__class__.__name__}"
        self.logger = logging.getLogger(name)


def log_performance(logger: logging.Logger):
    """
    Decorator to log function execution time.

    Usage:
        @log_performance(logger)
        def analyze_image(image):
            ...
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                execution_time = time.perf_counter() - start_time
                logger.error(f"{func.__name__} failed after {execution_time:.3f}s: {e}")
                raise
            execution_time = time.perf_counter() - start_time
            logger.debug(f"{func.__name__} completed in {execution_time:.3f}s")
            return result
        return wrapper
    return decorator
