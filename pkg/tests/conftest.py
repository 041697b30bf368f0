import pytest

_OUTCOMES: dict[int, list[bool]] = {}
_TITLES: dict[int, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    _TITLES.setdefault(n, mark.args[1] if len(mark.args) > 1 else "")
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _OUTCOMES.setdefault(n, []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        status = "PASS" if all(_OUTCOMES[n]) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {_TITLES[n]}")
