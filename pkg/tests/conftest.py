import pytest

from xp2.model import ModelParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def unit():
    return ModelParams(1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
