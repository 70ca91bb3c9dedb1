from pathlib import Path

import pytest

from ciflin.dsl import parse_model
from ciflin.model import Atom

ROOT = Path(__file__).resolve().parent.parent
TRAINGATE = ROOT / "models" / "traingate.cif"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def traingate():
    return parse_model(TRAINGATE.read_text())


@pytest.fixture(scope="session")
def tg(traingate):
    return traingate.main


@pytest.fixture(scope="session")
def gate(traingate):
    return Atom(traingate.automaton("Gate"))


@pytest.fixture(scope="session")
def train0(traingate):
    return Atom(traingate.automaton("Train0"))


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
