from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=30, deadline=None)
settings.load_profile("default")

A_VALUES = [Fraction(-1, 2), Fraction(0), Fraction(1, 3), Fraction(1, 2)]


@pytest.fixture(params=A_VALUES, ids=lambda a: f"a={a}")
def a_exact(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance matrix")
        for i in sorted(lines):
            terminalreporter.write_line(lines[i])
