import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import EQ13  # noqa: E402


@pytest.fixture
def eq13():
    return EQ13.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20150801)

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line per criterion; fails the test when not met."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
