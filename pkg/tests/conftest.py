import math

import numpy as np
import pytest
from hypothesis import settings

from coherent_zxz import GateParams, XErrorModel

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

PI = math.pi

# (criterion label, PASS/FAIL, detail) lines collected by test_acceptance
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_params(rng, n):
    return [
        GateParams(rng.uniform(0, PI), rng.uniform(0, 2 * PI), rng.uniform(0, 2 * PI)) for _ in range(n)
    ]


def random_errors(rng, n, max_delta=0.5 * PI):
    return [
        XErrorModel.from_delta(rng.uniform(-max_delta, max_delta), rng.uniform(0, 2 * PI), rng.uniform(0, 2 * PI))
        for _ in range(n)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
