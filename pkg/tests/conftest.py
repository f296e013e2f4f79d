import numpy as np
import pytest

from qsubgraph.graph import builtin_graph


@pytest.fixture
def p3w():
    return builtin_graph("p3w")


@pytest.fixture
def kite():
    return builtin_graph("kite")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# One line per acceptance criterion, filled in by tests/test_acceptance.py and
# printed at the end of the session so it lands in the captured log.
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
