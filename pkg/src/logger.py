"""
Logging utility for the NC phase-space toolkit
"""
import logging
import json
from datetime import datetime
from typing import Any, Dict, Optional

from src.config import Config


class PhaseLogger:
    """Logger for checks, scans and trajectories with structured JSON payloads"""

    def __init__(self, log_file: str = "ncphase.log", log_level: str = "INFO"):
        self.log_file = log_file
        self.logger = logging.getLogger("ncphase")
        self.logger.setLevel(getattr(logging, log_level.upper()))

        # Clear existing handlers
        self.logger.handlers.clear()
        self.logger.propagate = False

        file_formatter = logging.Formatter(
            '%(asctime)s | %(levelname)s | %(funcName)s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        console_formatter = logging.Formatter(
            '%(asctime)s | %(levelname)s | %(message)s',
            datefmt='%H:%M:%S'
        )

        file_handler = logging.FileHandler(self.log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(file_formatter)

        # stderr, so stdout stays clean for CSV output
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(console_formatter)

        self.logger.addHandler(file_handler)
        self.logger.addHandler(console_handler)

    def _emit(self, level: int, label: str, payload: Dict[str, Any]):
        payload["timestamp"] = datetime.now().isoformat()
        self.logger.log(level, f"{label}: {json.dumps(payload, default=str)}")

    def log_check_attempt(self, check: str, **kwargs):
        """Log the start of a quantumness/separability check"""
        self._emit(logging.DEBUG, "Check Attempt", {"action": "CHECK_ATTEMPT", "check": check, **kwargs})

    def log_verdict(self, check: str, passes: bool, min_eigenvalue: float, **kwargs):
        """Log the outcome of a PSD verdict"""
        self._emit(logging.INFO, "Verdict", {
            "action": "VERDICT",
            "check": check,
            "passes": bool(passes),
            "min_eigenvalue": float(min_eigenvalue),
            **kwargs
        })

    def log_error(self, error: Exception, details: Optional[Dict[str, Any]] = None):
        """Log a failed computation"""
        self._emit(logging.ERROR, "Computation Error", {
            "action": "COMPUTATION_ERROR",
            "error_type": type(error).__name__,
            "error_message": str(error),
            "details": details or {},
        })

    def log_validation_error(self, field: str, value: Any, reason: str):
        """Log validation errors"""
        self._emit(logging.WARNING, "Validation Error", {
            "action": "VALIDATION_ERROR",
            "field": field,
            "value": str(value),
            "reason": reason,
        })

    def log_scan_point(self, theta: float, eta: float, margin: float, entangled: bool):
        """Log one kinematic-scan grid point"""
        self._emit(logging.DEBUG, "Scan Point", {
            "action": "SCAN_POINT",
            "theta": theta,
            "eta": eta,
            "margin": margin,
            "entangled": bool(entangled),
        })

    def log_optimizer_result(self, bell_value: float, iterations: int, budget_exhausted: bool, **kwargs):
        """Log the result of a Bell amplitude search"""
        self._emit(logging.INFO, "Optimizer Result", {
            "action": "OPTIMIZER_RESULT",
            "bell_value": bell_value,
            "iterations": iterations,
            "budget_exhausted": bool(budget_exhausted),
            **kwargs
        })

    def log_trajectory_row(self, t: float, bell_c: float, bell_nc: float):
        """Log one row of a Bell trajectory comparison"""
        self._emit(logging.DEBUG, "Trajectory Row", {
            "action": "TRAJECTORY_ROW",
            "t": t,
            "bell_c": bell_c,
            "bell_nc": bell_nc,
        })

    def info(self, message: str):
        """Log info message"""
        self.logger.info(message)

    def warning(self, message: str):
        """Log warning message"""
        self.logger.warning(message)

    def error(self, message: str):
        """Log error message"""
        self.logger.error(message)

    def debug(self, message: str):
        """Log debug message"""
        self.logger.debug(message)


# Global logger instance
phase_logger = PhaseLogger(Config.LOG_FILE, Config.LOG_LEVEL)
