"""
Logging utilities for Outcome Optimizer

One OptimizationLogger wraps the stdlib logger "outcome_optimizer". Besides
plain messages it keeps an operation log (one record per finished operation,
with its duration and the number of SDP solves it triggered) and solver
statistics. Timings stay in the log; run reports only carry the statistics.
"""

import logging
import time
from dataclasses import dataclass, field
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

CONSOLE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'


@dataclass
class OperationRecord:
    """A finished operation"""
    operation: str
    success: bool
    started_at: str
    duration_seconds: float
    solves: int
    details: Dict[str, Any] = field(default_factory=dict)
    result: Dict[str, Any] = field(default_factory=dict)


def _empty_statistics() -> Dict[str, Any]:
    return {"solves": 0, "retries": 0, "failures": 0, "backends": {}}


class OptimizationLogger:
    """Logger for solves and the operations built on them"""

    def __init__(self, name: str = "outcome_optimizer", level: int = logging.INFO,
                 log_dir: Optional[str] = None):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(level)

        # Loggers are process-wide; one console handler per name
        if not self.logger.handlers:
            console_handler = logging.StreamHandler()
            console_handler.setLevel(logging.INFO)
            console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt='%H:%M:%S'))
            self.logger.addHandler(console_handler)
        if log_dir:
            self.add_log_file(log_dir)

        self._open: Dict[str, Tuple[float, str, int, Dict[str, Any]]] = {}
        self.operation_logs: List[OperationRecord] = []
        self.solver_stats: Dict[str, Any] = _empty_statistics()

    def add_log_file(self, log_dir: str) -> Path:
        """Attach a dated DEBUG-level file handler (once per file)"""
        directory = Path(log_dir)
        directory.mkdir(parents=True, exist_ok=True)
        filename = (directory / f"outcome_optimizer_{datetime.now().strftime('%Y%m%d')}.log").resolve()
        if not any(isinstance(h, logging.FileHandler) and Path(h.baseFilename) == filename
                   for h in self.logger.handlers):
            file_handler = logging.FileHandler(filename)
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
            self.logger.addHandler(file_handler)
        return filename

    def set_console_level(self, level: int):
        for handler in self.logger.handlers:
            if type(handler) is logging.StreamHandler:
                handler.setLevel(level)

    def start_operation(self, operation_name: str, details: Optional[Dict[str, Any]] = None):
        details = dict(details or {})
        self._open[operation_name] = (time.perf_counter(), datetime.now().isoformat(),
                                      self.solver_stats["solves"], details)
        self.logger.info(f"Started: {operation_name}")
        for key, value in details.items():
            self.logger.debug(f"  {key}: {value}")

    def end_operation(self, operation_name: str, success: bool = True,
                      result: Optional[Dict[str, Any]] = None) -> OperationRecord:
        """Close an operation; an operation never started is recorded with zero duration"""
        now = time.perf_counter()
        started, started_at, solves_before, details = self._open.pop(
            operation_name, (now, datetime.now().isoformat(), self.solver_stats["solves"], {}))

        record = OperationRecord(
            operation=operation_name,
            success=success,
            started_at=started_at,
            duration_seconds=round(now - started, 3),
            solves=self.solver_stats["solves"] - solves_before,
            details=details,
            result=dict(result or {}),
        )
        self.operation_logs.append(record)

        self.logger.info(f"{'Completed' if success else 'Failed'}: {operation_name} "
                         f"({record.duration_seconds:.3f}s, {record.solves} solves)")
        for key, value in record.result.items():
            if isinstance(value, (int, float, str, bool)):
                self.logger.debug(f"  {key}: {value}")
        return record

    def log_validation(self, item_type: str, issues: Optional[List[str]] = None):
        if not issues:
            self.logger.debug(f"Validation passed: {item_type}")
            return
        self.logger.error(f"Validation issues for {item_type}: {len(issues)} problems")
        for issue in issues:
            self.logger.error(f"  - {issue}")

    def log_solve(self, problem_name: str, backend: str, tol: float, status: str,
                  objective: float, gap: float, retried: bool = False):
        """Record one conic solve"""
        stats = self.solver_stats
        stats["solves"] += 1
        stats["backends"][backend] = stats["backends"].get(backend, 0) + 1
        stats["retries"] += int(retried)
        stats["failures"] += int(status != "optimal")
        self.logger.debug(f"Solve {problem_name}: backend={backend} tol={tol:.1e} status={status} "
                          f"objective={objective:.10g} gap={gap:.2e}")

    def log_retry(self, problem_name: str, backend: str, reason: str, new_tol: float):
        self.logger.warning(f"Solve {problem_name} on {backend} failed ({reason}); retrying with tol={new_tol:.1e}")

    def get_solver_statistics(self) -> Dict[str, Any]:
        """Solve, retry and failure counts with per-backend solves; no timings"""
        stats = dict(self.solver_stats)
        stats["backends"] = dict(sorted(self.solver_stats["backends"].items()))
        return stats

    def operation_summary(self) -> List[Dict[str, Any]]:
        """Finished operations in order, without timings"""
        return [{"operation": r.operation, "success": r.success, "solves": r.solves}
                for r in self.operation_logs]

    def reset_statistics(self):
        self.solver_stats = _empty_statistics()
        self.operation_logs = []


def timed_operation(operation_name: str, logger: Optional[OptimizationLogger] = None):
    """Decorator bracketing a call with start_operation/end_operation"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            active = logger or get_logger()
            active.start_operation(operation_name)
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                active.end_operation(operation_name, success=False, result={"error": str(e)})
                raise
            active.end_operation(operation_name, success=True)
            return result
        return wrapper
    return decorator


# Global logger instance
_global_logger: Optional[OptimizationLogger] = None


def setup_logging(level: int = logging.INFO, log_dir: Optional[str] = None) -> OptimizationLogger:
    """Replace the global logger"""
    global _global_logger
    _global_logger = OptimizationLogger("outcome_optimizer", level, log_dir)
    return _global_logger


def get_logger() -> OptimizationLogger:
    global _global_logger
    if _global_logger is None:
        _global_logger = OptimizationLogger()
    return _global_logger


def log_info(message: str):
    """Quick info logging"""
    get_logger().logger.info(message)


def log_debug(message: str):
    """Quick debug logging"""
    get_logger().logger.debug(message)


def log_warning(message: str):
    """Quick warning logging"""
    get_logger().logger.warning(message)


def log_error(message: str):
    """Quick error logging"""
    get_logger().logger.error(message)
