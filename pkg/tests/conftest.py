import pytest

from dude.model import make_scenario

FCELL_DBM = 20.0
PCELL_DBM = 30.0


@pytest.fixture
def fcell4():
    return make_scenario(FCELL_DBM, 15.0, 4.0)


@pytest.fixture
def pcell4():
    return make_scenario(PCELL_DBM, 15.0, 4.0)


@pytest.fixture
def fcell3():
    return make_scenario(FCELL_DBM, 5.0, 3.0)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record one verdict line per acceptance criterion; shown in the terminal summary."""
    def record(criterion, passed, detail):
        verdict = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        line = f"[{verdict}] {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
