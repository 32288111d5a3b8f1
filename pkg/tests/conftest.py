import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_log  # noqa: E402
from elbacktest.synth import generate_appendix_case  # noqa: E402


@pytest.fixture(scope="session")
def cases():
    return {k: generate_appendix_case(k) for k in (1, 2, 3)}


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
