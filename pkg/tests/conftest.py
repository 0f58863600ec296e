import math

import pytest

import ramanfock as rf

# g/2pi = 50 kHz, Omega_L = g/30, delta/2pi = 1 MHz  (delta/g = 20, r = 30)
G_HZ = 50e3
DELTA_HZ = 1e6


def reference_params(r: float = 30.0, delta_over_g: float = 20.0) -> rf.RamanParams:
    return rf.RamanParams.from_hz(G_HZ, G_HZ / r, G_HZ * delta_over_g)


@pytest.fixture
def params():
    return reference_params()


@pytest.fixture
def coherent_field():
    return rf.coherent_state(rf.TruncatedFockSpace(40), math.sqrt(5.0))


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
