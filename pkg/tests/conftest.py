import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from necklace.catalog import fig2_spec, gasket_spec, good4_spec  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def gasket():
    return gasket_spec()


@pytest.fixture(scope="session")
def good4():
    return good4_spec()


@pytest.fixture(scope="session")
def fig2():
    return fig2_spec()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
