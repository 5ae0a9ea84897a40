import math

import numpy as np
import pytest

from simlab.rng import RandomStream


@pytest.fixture
def stream():
    return RandomStream(seed=20240611)


def assert_close_clt(sample_mean, target, sd, n, k=5.0):
    """|mean - target| within ``k`` standard errors."""
    bound = k * sd / math.sqrt(n)
    assert abs(sample_mean - target) <= bound, f"{sample_mean} vs {target} (bound {bound:.3g})"


def ci_covers(report, value):
    lo, hi = report.ci
    assert lo <= value <= hi, f"{value} outside [{lo}, {hi}]"


# filled by test_acceptance.py, one line per criterion
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
