from pathlib import Path

import pytest

from lyricanchor.lexicon import default_g2p_rules, load_lexicon

DATA = Path(__file__).parent / "data"

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "seen": False})
    if report.when == "call":
        entry["seen"] = True
    if report.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] and e["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {e['title']}")


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon((DATA / "lexicon.txt").read_text())


@pytest.fixture(scope="session")
def rules():
    return default_g2p_rules()


@pytest.fixture(scope="session")
def short_text():
    return (DATA / "short.txt").read_text()


@pytest.fixture(scope="session")
def song_text():
    return (DATA / "song.txt").read_text()
