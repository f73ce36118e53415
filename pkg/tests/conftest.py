import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n, title = marker.args
    passed = call.excinfo is None
    prev = _CRITERIA.get(n)
    status = "PASS" if passed and (prev is None or prev[1] == "PASS") else "FAIL"
    _CRITERIA[n] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")


def read_jsonl(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def wordnet_vectors():
    from pungen.resources import wordnet_embeddings

    return wordnet_embeddings()


@pytest.fixture(scope="session")
def wordnet_lm(wordnet_vectors):
    from pungen.resources import wordnet_language_model

    return wordnet_language_model(wordnet_vectors)


@pytest.fixture(scope="session")
def hom_puns():
    from pungen.types import PunPair

    return [(r["sentence"], PunPair(r["pw"], r["aw"])) for r in read_jsonl(FIXTURES / "homophonic_puns.jsonl")]


@pytest.fixture(scope="session")
def non_puns():
    from pungen.types import PunPair

    return [(r["sentence"], PunPair(r["pw"], r["aw"])) for r in read_jsonl(FIXTURES / "nonpuns.jsonl")]
