"""Prints one PASS/FAIL line per acceptance check at the end of a run."""

from __future__ import annotations

import pytest

_ACCEPTANCE_FILE = "test_acceptance.py"
_verdicts: dict[str, bool] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.path.name != _ACCEPTANCE_FILE:
        return
    if report.when == "call":
        _verdicts[item.name] = report.passed
    elif report.failed:
        # setup or teardown blew up: the criterion did not pass
        _verdicts[item.name] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _verdicts.items():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
