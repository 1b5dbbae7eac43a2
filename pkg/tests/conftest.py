import csv
from pathlib import Path

import pytest

from manyroot.transform import make_params

DATA = Path(__file__).parent / "data"
SCENARIOS = Path(__file__).parent.parent / "scenarios"


def _read(name):
    with open(DATA / name, newline="") as fh:
        return list(csv.reader(fh))[1:]


@pytest.fixture(scope="session")
def n55():
    return make_params(5, 11, 5)


@pytest.fixture(scope="session")
def p155():
    return make_params(5, 31, 5)


@pytest.fixture(scope="session")
def golden_cipher_map():
    """Published m -> m^5 mod 55 map, transcribed by hand."""
    return [(int(m), int(c)) for m, c in _read("golden_cipher_map.csv")]


@pytest.fixture(scope="session")
def golden_classes():
    return {int(r[0]): tuple(int(v) for v in r[1:]) for r in _read("golden_classes.csv")}


@pytest.fixture
def scenario_path():
    return lambda name: SCENARIOS / f"{name}.json"


_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark and rep.when == "call":
        _CRITERIA.append((mark.args[0], mark.args[1], rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(_CRITERIA):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}")
