import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from acceptance_runs import TITLES  # noqa: E402

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        k = mark.args[0]
        passed = rep.passed and not hasattr(rep, "wasxfail")
        prev = _RESULTS.get(k, True)
        _RESULTS[k] = prev and passed


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(TITLES):
        if k not in _RESULTS:
            continue
        status = "PASS" if _RESULTS[k] else "FAIL"
        tr.write_line(f"criterion {k:2d}: {status}  {TITLES[k]}")
