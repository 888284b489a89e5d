"""
Utility functions and helpers.

Logging setup and the root exception shared across the application.
"""

from .errors import CmScopeError
from .logger import (
    setup_logger,
    setup_application_logging,
    LoggerMixin,
    log_performance
)

__all__ = [
    "CmScopeError",
    "setup_logger",
    "setup_application_logging",
    "LoggerMixin",
    "log_performance"
]
