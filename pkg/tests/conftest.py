import sys

import numpy as np
import pytest

from l1median import instances


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["unit_square", "l_shape", "holed_square", "triangle", "two_holes", "comb"])
def named_domain(request):
    return instances.named(request.param)


@pytest.fixture
def square():
    return instances.named("unit_square")


@pytest.fixture
def lshape():
    return instances.named("l_shape")


@pytest.fixture
def holed():
    return instances.named("holed_square")


@pytest.fixture
def two_holes():
    return instances.named("two_holes")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
