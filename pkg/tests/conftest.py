import pytest

_criterion_lines: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collector for per-criterion result lines, echoed after the run."""
    return _criterion_lines.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
