import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, text): acceptance criterion a test checks")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    key, text = crit
    prev = _criteria.get(key, (text, True))
    _criteria[key] = (text, prev[1] and report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=str):
        text, ok = _criteria[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {text}")
