import sys

import pytest

from curved_dirac import background as bg
from curved_dirac.gamma_algebra import ModelParams

FIG_PARAMS = ModelParams(tau=1.0, mass=1.0, curvature_R=0.2)


@pytest.fixture(scope="session")
def params():
    return FIG_PARAMS


@pytest.fixture(scope="session")
def linear(params):
    return bg.solve_profile(bg.LinearFlat(0.3, 0.5), params)


@pytest.fixture(scope="session")
def hyperbolic(params):
    return bg.solve_profile(bg.HyperbolicConst(0.7, 0.3, 0.5), params)


@pytest.fixture(scope="session")
def trig(params):
    return bg.solve_profile(bg.TrigConst(0.7, 0.5, 0.3), params)


@pytest.fixture(scope="session")
def flat(params):
    return bg.solve_profile(bg.Flat(1.0, 0.0), params)


@pytest.fixture(scope="session", params=["linear", "hyperbolic", "trig"])
def glued(request):
    return request.getfixturevalue(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
