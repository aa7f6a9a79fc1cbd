import re

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_results = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    key = int(match.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _results[key] = (name, "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results):
        name, verdict = _results[key]
        terminalreporter.write_line(f"criterion {key:>2}: {verdict}  {name}")
