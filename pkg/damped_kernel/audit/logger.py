"""
Audit logging for damped-kernel runs.

One JSON event per line: which command ran with which resolved config, what
was written where, every invariant verdict and every numerical refusal.
Result files never carry timestamps; the audit log is where they live.
"""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional


class RunAuditLogger:
    """
    Structured JSON-lines audit logger.

    Features:
    - JSON event logging
    - Append-only log file
    - Null mode (``enabled=False``) that drops every event
    """

    def __init__(self, log_file: str = "./audit.log", level: str = "INFO", enabled: bool = True):
        """
        Initialize audit logger.

        Args:
            log_file: Path to audit log
            level: Logging level (DEBUG, INFO, WARNING, ERROR)
            enabled: Write events at all
        """
        self.enabled = enabled
        self.log_file = Path(log_file)
        self.logger = logging.getLogger("damped_kernel_audit")
        self.logger.setLevel(getattr(logging, level))
        self.logger.propagate = False

        # Remove existing handlers to avoid duplicates
        for handler in list(self.logger.handlers):
            handler.close()
        self.logger.handlers = []

        if not enabled:
            self.logger.addHandler(logging.NullHandler())
            return

        self.log_file.parent.mkdir(parents=True, exist_ok=True)
        fh = logging.FileHandler(self.log_file, mode="a")
        fh.setLevel(getattr(logging, level))
        fh.setFormatter(logging.Formatter("%(message)s"))
        self.logger.addHandler(fh)

    def _log_event(self, event_dict: Dict[str, Any]):
        """
        Log a structured event as JSON.

        Args:
            event_dict: Event data to log
        """
        if not self.enabled:
            return
        event_dict["timestamp"] = datetime.now(timezone.utc).isoformat()
        self.logger.info(json.dumps(event_dict, default=str))

    def log_run_started(self, command: str, config: Dict[str, Any]):
        """
        Log the start of a run with its resolved configuration.

        Args:
            command: Subcommand name
            config: Resolved configuration echo
        """
        self._log_event({"event": "run_started", "command": command, "config": config})

    def log_table_written(self, command: str, path: str, rows: int, columns: int,
                          elapsed_s: float, **kwargs):
        """
        Log a result table written to disk.

        Args:
            command: Subcommand name
            path: Output path ('-' for stdout)
            rows: Row count
            columns: Column count
            elapsed_s: Wall time of the run
            **kwargs: Additional metadata
        """
        event = {
            "event": "table_written",
            "command": command,
            "path": path,
            "rows": rows,
            "columns": columns,
            "elapsed_s": elapsed_s,
            **kwargs,
        }
        self._log_event(event)

    def log_invariant_checked(self, name: str, passed: bool, measured: float, tolerance: float):
        self._log_event({
            "event": "invariant_checked",
            "invariant": name,
            "passed": passed,
            "measured": measured,
            "tolerance": tolerance,
        })

    def log_numerical_refusal(self, reason: str, **kwargs):
        """
        Log a refused computation (e.g. an under-resolved quadrature grid).

        Args:
            reason: Refusal message
            **kwargs: Additional context
        """
        self._log_event({"event": "numerical_refusal", "reason": reason, **kwargs})

    def log_error(self, error_type: str, message: str, context: Optional[Dict] = None):
        """
        Log run error.

        Args:
            error_type: Type of error
            message: Error message
            context: Optional context dictionary
        """
        event = {
            "event": "error",
            "error_type": error_type,
            "message": message,
            **(context or {}),
        }
        self._log_event(event)

    def close(self):
        for handler in list(self.logger.handlers):
            handler.close()
        self.logger.handlers = []


def get_audit_logger(config: Optional[Dict[str, Any]] = None) -> RunAuditLogger:
    """
    Get configured audit logger instance.

    Args:
        config: Audit config dict with 'enabled', 'file' and 'level' keys

    Returns:
        RunAuditLogger instance
    """
    if config is None:
        config = {"enabled": True, "file": "./audit.log", "level": "INFO"}

    return RunAuditLogger(
        log_file=config.get("file") or "./audit.log",
        level=config.get("level", "INFO"),
        enabled=config.get("enabled", True),
    )
