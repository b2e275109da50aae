"""Tests for the JSON-lines audit log."""

import json

from damped_kernel.audit.logger import RunAuditLogger, get_audit_logger


def read_events(path):
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


class TestRunAuditLogger:
    """Tests for structured audit events."""

    def test_events_are_json_lines(self, tmp_path):
        log_file = tmp_path / "logs" / "audit.log"
        audit = RunAuditLogger(str(log_file))
        audit.log_run_started("kernel", {"physics": {"kappa": 0.6}})
        audit.log_table_written("kernel", "out.csv", rows=3, columns=6, elapsed_s=0.01)
        audit.log_invariant_checked("free_reduction", True, 1e-9, 1e-6)
        audit.log_numerical_refusal("grid too coarse", phase_step=1.2, required_panels=9)
        audit.log_error("ConfigError", "bad kappa", {"command": "kernel"})
        audit.close()

        events = read_events(log_file)
        assert [e["event"] for e in events] == [
            "run_started", "table_written", "invariant_checked", "numerical_refusal", "error",
        ]
        assert events[0]["config"]["physics"]["kappa"] == 0.6
        assert events[1]["rows"] == 3
        assert events[3]["required_panels"] == 9
        assert events[4]["command"] == "kernel"
        assert all("timestamp" in e for e in events)

    def test_log_is_appended(self, tmp_path):
        log_file = tmp_path / "audit.log"
        for _ in range(2):
            audit = RunAuditLogger(str(log_file))
            audit.log_run_started("check", {})
            audit.close()
        assert len(read_events(log_file)) == 2

    def test_disabled_logger_writes_nothing(self, tmp_path):
        log_file = tmp_path / "audit.log"
        audit = RunAuditLogger(str(log_file), enabled=False)
        audit.log_run_started("kernel", {})
        audit.close()
        assert not log_file.exists()

    def test_factory(self, tmp_path):
        log_file = tmp_path / "audit.log"
        audit = get_audit_logger({"enabled": True, "file": str(log_file), "level": "INFO"})
        audit.log_error("ValueError", "boom")
        audit.close()
        assert read_events(log_file)[0]["message"] == "boom"
