import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# (number, title, passed, seconds, limit) rows filled in by test_acceptance
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num, title, ok, secs, limit in sorted(ACCEPTANCE):
        terminalreporter.write_line(
            f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f}s, limit {limit:g}s)")
