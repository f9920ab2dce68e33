import pytest

from ltmag import find_operating_point, preset

# criterion number -> (title, passed)
_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(num, title): marks a test as one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        _CRITERIA[marker.args[0]] = (marker.args[1], report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, passed = _CRITERIA[num]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")


@pytest.fixture(scope="session")
def baseline_config():
    return preset("baseline")


@pytest.fixture(scope="session")
def high_sens_config():
    return preset("high_sensitivity")


@pytest.fixture(scope="session")
def baseline_op_pump(baseline_config):
    return find_operating_point(baseline_config)
