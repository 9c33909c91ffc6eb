import pytest

from lefloc.cli import corpus_dir
from lefloc.ratfun import VarTable
from lefloc.scenario import load_scenario

ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def vt1():
    return VarTable(("lambda",))


@pytest.fixture(scope="session")
def vt2():
    return VarTable(("lambda", "mu"))


@pytest.fixture(scope="session")
def corpus():
    return {p.stem: load_scenario(p) for p in sorted(corpus_dir().glob("*.json"))}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
