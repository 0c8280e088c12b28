import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))
os.environ.setdefault("MPLBACKEND", "Agg")

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion: ``acceptance(number, ok, text)``."""
    def record(number, ok, text):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
