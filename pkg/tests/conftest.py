import functools

import pytest

from cadred import corpus


@functools.lru_cache(maxsize=None)
def _entry(name):
    return corpus.load(name)


@pytest.fixture(scope="session")
def entry():
    """Corpus entries, loaded once per session."""
    return _entry


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, text = mark.args
    if rep.failed or rep.when == "call":
        ok = rep.passed and _CRITERIA.get(number, (True,))[0]
        _CRITERIA[number] = (ok, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, text = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
