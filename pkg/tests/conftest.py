import pytest

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.fixture
def report(request):
    """Attach a one-line detail string to the acceptance criterion under test."""
    marker = request.node.get_closest_marker("criterion")
    n = marker.args[0]

    def note(text):
        _CRITERIA.setdefault(n, {})["detail"] = text
        print(f"criterion {n}: {text}")

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    n, title = marker.args
    entry = _CRITERIA.setdefault(n, {})
    entry["title"] = title
    entry["passed"] = rep.passed and entry.get("passed", True)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e.get("passed") else "FAIL"
        detail = f" -- {e['detail']}" if e.get("detail") else ""
        terminalreporter.write_line(f"[{status}] criterion {n}: {e.get('title', '?')}{detail}")
