"""Shared pytest wiring: one PASS/FAIL summary line per acceptance criterion."""

import re

_CRITERION = re.compile(r"test_criterion_0*(\d+)")
_results: dict[int, bool] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.failed:
        _results[k] = False
    elif report.when == "call" and report.passed:
        _results.setdefault(k, True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        verdict = "PASS" if _results[k] else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {verdict}")
