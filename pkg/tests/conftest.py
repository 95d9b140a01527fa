import math

import numpy as np
import pytest

from ptqwalk.operators import HomogeneousParams

THETA1 = math.pi / 4
THETA2 = -math.pi / 7

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _markers.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "passed": 0, "failed": [], "skipped": 0})
    if report.passed:
        entry["passed"] += 1
    elif report.skipped:
        entry["skipped"] += 1
    else:
        entry["failed"].append(report.nodeid.split("::")[-1])


_markers = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _markers[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        ok = not entry["failed"] and entry["passed"] > 0
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {entry['title']}"
        if entry["failed"]:
            line += f"  (failed: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fig_params():
    """Coin angles used throughout the band and growth studies."""

    def make(exp_gamma=1.0, phi=0.0):
        return HomogeneousParams(THETA1, THETA2, math.log(exp_gamma), phi)

    return make
