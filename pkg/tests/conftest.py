"""Shared fixtures and the acceptance-criteria reporting hook."""

import numpy as np
import pytest

from sensem.config import SystemConfig
from sensem.optimizer import DesignSettings, Scenario

# One pass/fail line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES: list[str] = []


def record_criterion(tag: str, passed: bool, detail: str) -> None:
    line = f"[{tag}] {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    assert passed, line


@pytest.fixture(scope="session")
def small_scenario() -> Scenario:
    """One fixed small realization shared by read-only tests."""
    cfg = SystemConfig(m_t=3, m_r=3, n_irs=4)
    return Scenario.sample(cfg, seed=7)


@pytest.fixture(scope="session")
def fast_settings() -> DesignSettings:
    return DesignSettings().fast()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
