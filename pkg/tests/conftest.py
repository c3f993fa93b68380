from pathlib import Path

import pytest

from tbound.configfile import load_config

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIXTURE_FILES = sorted(FIXTURES.glob("*.json"))

# filled by test_acceptance, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def fixture_config():
    return lambda name: load_config(FIXTURES / f"{name}.json")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
