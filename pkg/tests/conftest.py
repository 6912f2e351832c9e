import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_property_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_properties.py" in report.nodeid:
        _property_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    # acceptance criterion 11 is the randomized property suites
    if not _property_outcomes:
        return
    passed = sum(o == "passed" for o in _property_outcomes.values())
    total = len(_property_outcomes)
    status = "PASS" if passed == total else "FAIL"
    terminalreporter.write_line(
        f"criterion 11 {status}  randomized property suites ({passed}/{total} suites passed, 1000 cases each)"
    )
