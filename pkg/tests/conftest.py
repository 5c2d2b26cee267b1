"""Collects the acceptance report lines and prints them after the test run."""
import pytest

REPORT: list[str] = []


@pytest.fixture
def report():
    def _report(line: str) -> None:
        REPORT.append(line)
        print(line)
    return _report


def pytest_terminal_summary(terminalreporter):
    if REPORT:
        terminalreporter.section("acceptance report")
        for line in REPORT:
            terminalreporter.write_line(line)
