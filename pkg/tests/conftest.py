"""Shared long-running fixtures and the acceptance summary hook."""

import numpy as np
import pytest

from nonlocal_diffusion import FdConfig, Grid1D, Indicator, KernelRun, run_fd, solve_a

ACCEPTANCE_LINES = []

FD_OUTPUTS = (50.0, 500.0, 5000.0, 50000.0)


@pytest.fixture(scope="session")
def chi():
    return Indicator(1.0, 2.0)


@pytest.fixture(scope="session")
def chi_rescaling(chi):
    return solve_a(chi, 1e5)


@pytest.fixture(scope="session")
def kernel_400(chi, chi_rescaling):
    return KernelRun(chi, chi_rescaling, Grid1D.from_spacing(400.0, 0.1))


@pytest.fixture(scope="session")
def fd_long(chi):
    """The large-domain run: L = 400, dx = 0.2, up to t = 5e4."""
    mt = tuple(np.geomspace(1.0, 5e4, 95))
    cfg = FdConfig(Grid1D.from_spacing(400.0, 0.2), 5e4, FD_OUTPUTS, moment_times=mt)
    return run_fd(cfg, chi)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
