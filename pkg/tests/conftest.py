"""Shared pytest plumbing: surface the acceptance checklist."""
import sys


def pytest_terminal_summary(terminalreporter):
    mod = (sys.modules.get("test_acceptance")
           or sys.modules.get("tests.test_acceptance"))
    lines = getattr(mod, "_CHECKLIST", None) if mod else None
    if lines:
        terminalreporter.section("acceptance checklist")
        for line in lines:
            terminalreporter.line(line)
