import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, tuple[str, str, float, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if report.failed:
        message = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
        detail = f"{detail}; {message}" if detail else message
    _criteria[number] = ("PASS" if report.passed else "FAIL", title, report.duration, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, seconds, detail = _criteria[number]
        line = f"{status}  criterion {number:>2}  {title}  ({seconds:.1f}s)"
        if detail:
            line += f"  | {detail}"
        terminalreporter.write_line(line)
