import sys

import pytest

from cantorext import odometer
from cantorext.ifs import preset
from _support import odometer_labeling


@pytest.fixture(scope="session")
def odo():
    return odometer(3)


@pytest.fixture(scope="session")
def interval_lab():
    return odometer_labeling("interval2")


@pytest.fixture(scope="session")
def cube_lab():
    return odometer_labeling("cube2(2)")


@pytest.fixture(scope="session")
def interval2():
    return preset("interval2")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
