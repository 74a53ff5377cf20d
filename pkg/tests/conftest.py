import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

_CRITERIA: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def detail(request):
    """Lets an acceptance test attach a one-line measurement to its report line."""
    box = {"text": ""}
    request.node._criterion_detail = box
    return box


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    box = getattr(item, "_criterion_detail", {"text": ""})
    _CRITERIA[number] = (title, "PASS" if report.passed else "FAIL", box["text"])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, verdict, text = _CRITERIA[number]
        line = f"criterion {number} [{verdict}] {title}"
        terminalreporter.write_line(line + (f" :: {text}" if text else ""))
