import os
from pathlib import Path

import pytest
from hypothesis import settings

from hfsurgery import knot_library as kl

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

FULL = ["unknot", "T2_3", "T-2_3", "4_1", "5_2", "m5_2"]


def knot(name):
    return kl.get(name).complex


@pytest.fixture(params=FULL)
def full_name(request):
    return request.param


# one pass/fail line per acceptance criterion, printed after the run

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    mark = getattr(report, "criterion", None)
    if mark is None:
        return
    ok = report.passed if report.when == "call" else not report.failed
    prev = _criteria.get(mark, (True,))[0]
    _criteria[mark] = (prev and ok,)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = m.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (n, title), (ok,) in sorted(_criteria.items()):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")
