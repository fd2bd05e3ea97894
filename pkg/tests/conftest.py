import numpy as np
import pytest

from hukcf import _backend

BACKENDS = sorted(_backend.available_backends())

_criteria = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Kernel module for each importable backend."""
    return _backend.available_backends()[request.param]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        if rep.when == "setup" and rep.outcome == "failed":
            status = "ERROR"
        if hasattr(rep, "wasxfail"):
            status = "XFAIL"
            detail = f"{detail}; {rep.wasxfail}" if detail else rep.wasxfail
        elif rep.skipped and isinstance(rep.longrepr, tuple):
            detail = rep.longrepr[2]
        _criteria[(num, item.name)] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (num, _), (title, status, detail) in sorted(_criteria.items(), key=lambda kv: kv[0]):
        line = f"[{status}] #{num} {title}"
        if detail:
            line += f"  ({detail})"
        tr.write_line(line)
