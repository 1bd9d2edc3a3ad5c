from __future__ import annotations

import time

import pytest

from braket_qdmi.device import core

import support

_criteria: list[tuple[int, str, str, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        verdict = "PASS" if report.outcome == "passed" else "FAIL"
        _criteria.append((number, title, verdict, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict, duration in sorted(_criteria):
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({duration:.2f} s)")


@pytest.fixture(autouse=True)
def fresh_device():
    """Every test starts and ends without a process-wide device."""
    if core.current_device() is not None:
        core.device_finalize()
    yield
    if core.current_device() is not None:
        core.device_finalize()


@pytest.fixture
def cloud():
    return support.make_cloud()


@pytest.fixture
def device(cloud):
    runtime = support.make_runtime(cloud)
    assert core.device_initialize(runtime) is core.StatusCode.SUCCESS
    return core.current_device()


@pytest.fixture
def session(device):
    return support.open_session()


@pytest.fixture
def stopwatch():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start
