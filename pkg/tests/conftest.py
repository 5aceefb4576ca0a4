"""Collect acceptance PASS/FAIL lines and repeat them in the terminal summary."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    def record(number: int, passed: bool, summary: str) -> None:
        line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'} {summary}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
