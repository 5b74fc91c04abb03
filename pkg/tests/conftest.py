import pytest

_results: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(num, desc): numbered acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    num, desc = marker.kwargs["num"], marker.kwargs["desc"]
    if rep.when == "call":
        _results[num] = ("PASS" if rep.passed else "FAIL", desc)
    elif rep.when == "setup" and not rep.passed:
        _results[num] = ("FAIL", desc)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        word, desc = _results[num]
        terminalreporter.write_line(f"criterion {num:2d} {word} - {desc}")
