from __future__ import annotations

# (criterion, status, detail) lines collected by test_acceptance
ACCEPTANCE_LINES: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {criterion}: {status} - {detail}")
