import numpy as np
import pytest

from fastgrant.config import ScenarioConfig

ACCEPTANCE_LINES = []


@pytest.fixture
def small_cfg():
    return ScenarioConfig(n_devices=80, n_rbs=5, n_cycles=200, area_side_m=300.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
