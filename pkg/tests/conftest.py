from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# the printed final row of the worked buffer example, kept to document its error
PRINTED_ROW_14 = (2, 1, 1, 1, 2, 2, 2, 1, 2, 2, 1)


def read_inputs(path):
    return [int(ln.split("#")[0]) for ln in path.read_text().splitlines() if ln.split("#")[0].strip()]


@pytest.fixture
def buffer_example():
    inputs = read_inputs(FIXTURES / "buffer_11_3_4.inputs")
    trace = (FIXTURES / "buffer_11_3_4.trace").read_text().splitlines()
    return inputs, trace


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
