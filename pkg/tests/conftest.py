import random

import pytest

from entdistill import _backend
from entdistill.linalg import ComplexMatrix

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label, text = marker.args
        _CRITERIA.append((label, item.name, report.outcome.upper(), text))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, name, outcome, text in _CRITERIA:
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"criterion {label:<3} {verdict}  {text}  [{name}]")


@pytest.fixture(params=_backend.available())
def backend(request):
    with _backend.use(request.param):
        yield request.param


def random_matrix(n, rng, scale=1.0):
    return ComplexMatrix(n, n, tuple(complex(rng.gauss(0, scale), rng.gauss(0, scale)) for _ in range(n * n)))


@pytest.fixture
def rng():
    return random.Random(20240531)
