from __future__ import annotations

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if name.startswith("test_criterion_"):
        ACCEPTANCE[name] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        number = int(name.split("_")[2])
        title = name.split("_", 3)[3].replace("_", " ")
        status = "PASS" if ACCEPTANCE[name] else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} [{status}] {title}")
