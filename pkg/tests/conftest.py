import numpy as np
import pytest

from cfthp.config import ScenarioConfig
from cfthp.scenario import build_scenario

_CRITERIA = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def desk_config():
    return ScenarioConfig(n_aps=32, n_users=8, l_aps=8, cluster_max=4, n_a=1,
                          sigma_e2=0.01, n_outer=4, n_inner=4, seed=7)


@pytest.fixture(scope="session")
def desk_scenario(desk_config):
    return build_scenario(desk_config)


@pytest.fixture
def criterion():
    """Record a pass/fail line for the acceptance summary."""
    def record(number, title, ok, detail=""):
        _CRITERIA[number] = (title, bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}" + (f"  ({detail})" if detail else ""))
