from __future__ import annotations

import copy
import json
from pathlib import Path

import pytest

from cryptotaxonomy import data_path, load_corpus

FIXTURES = Path(__file__).parent / "fixtures"
CASE_STUDIES = data_path("case_studies.json")
FIXTURE_CORPUS = data_path("fixture_corpus.json")


def raw_assets(path: Path = CASE_STUDIES) -> dict[str, dict]:
    doc = json.loads(path.read_text())
    return {a["id"]: a for a in doc["assets"]}


@pytest.fixture(scope="session")
def case_corpus():
    return load_corpus(CASE_STUDIES)


@pytest.fixture(scope="session")
def fixture_corpus():
    return load_corpus(FIXTURE_CORPUS)


@pytest.fixture
def raw_case():
    """Fresh deep copy of one published case-study record by id."""
    cases = raw_assets()
    return lambda asset_id: copy.deepcopy(cases[asset_id])


@pytest.fixture
def write_json(tmp_path):
    def _write(doc, name="corpus.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc, indent=2))
        return path

    return _write


def minimal_raw(**overrides) -> dict:
    raw = {
        "id": "x",
        "symbol": "X",
        "technical_standard": "native",
        "function": "utility",
        "issuer_kind": "none",
        "minting_type": "consensus",
        "yield_source": "none",
        "distribution_mechanism": "none",
        "reference": None,
        "is_stablecoin": False,
        "redemption_mechanism": "none",
        "form_of_claim": "no_claim",
        "critical_resource_surface": {},
    }
    raw.update(overrides)
    return raw


# Filled by test_acceptance.py; echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
