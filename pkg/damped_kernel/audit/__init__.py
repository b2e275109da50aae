"""Audit logging module."""

from damped_kernel.audit.logger import RunAuditLogger, get_audit_logger

__all__ = ["RunAuditLogger", "get_audit_logger"]
