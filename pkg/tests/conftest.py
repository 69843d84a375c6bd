import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

KAPPA_MAX = 0.004 * math.pi
S_PERIOD = 250.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def table_path():
    from lanerep.path import closed_path
    return closed_path(KAPPA_MAX, S_PERIOD, 4)


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.fixture
def detail(request):
    """Append measured values to the acceptance summary line of the running test."""
    notes = []
    request.node.criterion_notes = notes
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    num, title = mark.args
    notes = "; ".join(getattr(item, "criterion_notes", []))
    _criteria[num] = (title, "PASS" if rep.passed else "FAIL", notes)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status, notes = _criteria[num]
        line = f"criterion {num:2d} {status}  {title}"
        terminalreporter.write_line(line + (f"  [{notes}]" if notes else ""))
