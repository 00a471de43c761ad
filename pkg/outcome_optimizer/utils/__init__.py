"""
Utility functions for Outcome Optimizer
"""

from .logging import (
    OptimizationLogger,
    setup_logging,
    get_logger,
    log_info,
    log_debug,
    log_warning,
    log_error,
    timed_operation
)

__all__ = [
    "OptimizationLogger",
    "setup_logging",
    "get_logger",
    "log_info",
    "log_debug",
    "log_warning",
    "log_error",
    "timed_operation",
]
