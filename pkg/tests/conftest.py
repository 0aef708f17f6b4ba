import pytest

_criteria = []


@pytest.fixture
def criterion(record_property):
    """Attach a one-line result summary to an acceptance test."""
    def _record(text):
        record_property("criterion", text)
    return _record


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::test_criterion_", 1)[1]
    _criteria.append((name, report.outcome, props.get("criterion", "")))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, text in sorted(_criteria, key=lambda c: int(c[0].split("_")[0])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {name}: {text}")
