"""Acceptance bookkeeping: one pass/fail line per criterion in the terminal summary."""

import pytest

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.fixture
def note(request):
    """Attach a short measured value to the current acceptance criterion."""
    marker = request.node.get_closest_marker("acceptance")
    if marker is None:
        return lambda text: None
    entry = _RESULTS.setdefault(marker.args[0], {"title": marker.args[1], "outcomes": [], "notes": []})
    return entry["notes"].append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry = _RESULTS.setdefault(marker.args[0], {"title": marker.args[1], "outcomes": [], "notes": []})
        entry["outcomes"].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        ok = bool(entry["outcomes"]) and all(entry["outcomes"])
        detail = "; ".join(entry["notes"])
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {entry['title']}" + (f" -- {detail}" if detail else ""))
