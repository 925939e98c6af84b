import pytest

from levcool.models import FiveModeParams
from levcool.params import reduced_three_mode

# Reduced three-mode cooling set (rates in units of the first mechanical frequency).
COOLING_SET = dict(omega2=0.75, G1=0.22, G2=-0.19, Gx=-0.046, delta=1.0, kappa=0.2,
                   gamma1=0.5e-8, gamma2=0.5e-8, n_th1=1e5, n_th2=1e5)

FIVE_MODE_SET = dict(omega=(1.0, 0.75, 0.41, 0.31), Gx=-0.02, Gz=-0.03,
                     couplings=(-0.1, -0.09, -0.12, -0.10), delta=1.0, kappa=0.2,
                     gamma=(0.5e-8,) * 4, n_th=(1e5,) * 4)


@pytest.fixture
def cooling_params():
    return reduced_three_mode(**COOLING_SET)


@pytest.fixture
def five_mode_params():
    return FiveModeParams(**FIVE_MODE_SET)


# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
