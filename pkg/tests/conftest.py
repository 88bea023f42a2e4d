from __future__ import annotations

import numpy as np
import pytest

from qsr.doubled import DoubledMatrix
from qsr.system import PhysicalParams

# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def damped_cavity() -> PhysicalParams:
    """Single mode, detuning 1, decay rate 2, canonical Theta."""
    return PhysicalParams(
        M=DoubledMatrix([[1.0]], [[0.0]]),
        N=DoubledMatrix([[np.sqrt(2.0)]], [[0.0]]),
        S=np.eye(1),
    )


def scalar(x) -> DoubledMatrix:
    return DoubledMatrix([[x]], [[0.0]])
