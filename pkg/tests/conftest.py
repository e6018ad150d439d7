"""Terminal summary hook that prints one pass/fail line per acceptance
criterion after the run."""

import re

_detail = {}
_failed = set()


def record_criterion(num, detail):
    """Called at the end of each acceptance test with its measured numbers."""
    _detail[num] = detail


def pytest_runtest_logreport(report):
    if not report.failed or report.when not in ("setup", "call"):
        return
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if m:
        _failed.add(int(m.group(1)))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    seen = sorted(set(_detail) | _failed)
    if not seen:
        return
    terminalreporter.section("acceptance criteria")
    for num in seen:
        if num in _failed:
            terminalreporter.write_line(f"criterion {num:2d}: FAIL")
        else:
            terminalreporter.write_line(f"criterion {num:2d}: PASS  {_detail[num]}")
