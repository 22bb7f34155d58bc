from pathlib import Path

import pytest

from desattack.formats import load_plant, load_relation
from desattack.oracle import random_corpus
from desattack.structure import build_attack_structure
from desattack.supremal import trim_supremal

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
PLANT_FILE = FIXTURES / "plant.json"
RELATION_FILE = FIXTURES / "misleading-relation.json"


@pytest.fixture(scope="session")
def plant():
    return load_plant(PLANT_FILE)


@pytest.fixture(scope="session")
def relation(plant):
    return load_relation(RELATION_FILE, plant)


@pytest.fixture(scope="session")
def a_inf(plant):
    return build_attack_structure(plant)


@pytest.fixture(scope="session")
def sub(a_inf):
    return trim_supremal(a_inf)


@pytest.fixture(scope="session")
def corpus():
    return random_corpus(seed=2024, size=20)


# -- acceptance reporting ------------------------------------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if report.when == "call" or report.failed:
        ok = report.passed and _criteria.get(n, (True,))[0]
        _criteria[n] = (ok, item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, name = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({name})")
