import numpy as np
import pytest

from cjt.meanfield import ModelParams

# Standard dispersion-figure regime: Delta/g = 1, t/g = 0.5, omega_z/g = 1.
FIG1 = dict(Delta=1.0, t=0.5, omega_z=1.0, g=1.0)


@pytest.fixture
def fig1_params():
    return ModelParams.chain(N=100, **FIG1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
