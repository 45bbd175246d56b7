from __future__ import annotations

import json
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryptotaxonomy.centralisation import ownership_parties
from cryptotaxonomy.classification import classify
from cryptotaxonomy.corpus import (
    CorpusError,
    HolderSnapshot,
    dumps_corpus,
    dumps_holder_snapshot,
    load_corpus,
    load_holder_snapshot,
    parse_corpus,
    parse_holder_snapshot,
)

from conftest import FIXTURE_CORPUS, FIXTURES, CASE_STUDIES

CASE_IDS = ["btc", "uni", "hbar", "dai", "wbtc", "steth", "cbeth", "xrp", "hbarx"]


def case_doc() -> dict:
    return json.loads(CASE_STUDIES.read_text())


def errors(issues):
    return [i for i in issues if i.severity == "error"]


def test_load_case_studies():
    corpus = load_corpus(CASE_STUDIES)
    assert [a.id for a in corpus.assets] == CASE_IDS
    assert corpus.provenance.snapshot_date.isoformat() == "2025-11-19"
    assert corpus.get("hbarx").distribution_mechanism is None
    with pytest.raises(KeyError):
        corpus.get("eth")


def test_fixture_corpus_has_thirty_assets():
    corpus = load_corpus(FIXTURE_CORPUS)
    assert len(corpus) == 30
    synthetic = [a for a in corpus.assets if a.id.startswith("syn-")]
    assert len(synthetic) == 21
    assert all(a.name.startswith("SYNTHETIC") for a in synthetic)


def test_duplicate_id_rejected(write_json):
    doc = case_doc()
    doc["assets"].append(dict(doc["assets"][3]))
    with pytest.raises(CorpusError) as info:
        load_corpus(write_json(doc))
    messages = [i.message for i in info.value.issues]
    assert "duplicate id (first at assets[3], again at assets[9])" in messages


def test_unknown_literal_carries_path_and_hint():
    doc = case_doc()
    doc["assets"][5]["distribution_mechanism"] = "quantity_acrual"
    corpus, issues = parse_corpus(json.dumps(doc))
    assert corpus is None
    (issue,) = errors(issues)
    assert issue.path == "assets[5].distribution_mechanism"
    assert "did you mean 'quantity_accrual'" in issue.message


def test_malformed_json_reports_position():
    corpus, issues = parse_corpus('{"version": 1,\n "assets": [}')
    assert corpus is None
    assert issues[0].path == "line 2, column 13"
    assert issues[0].message.startswith("malformed JSON")


@pytest.mark.parametrize("version", [2, "1", None])
def test_corpus_version_checked(version):
    doc = case_doc()
    doc["version"] = version
    corpus, issues = parse_corpus(json.dumps(doc))
    assert corpus is None and errors(issues)[0].path == "version"


def test_unknown_top_level_key_strict_vs_lenient():
    doc = case_doc()
    doc["notes"] = "x"
    assert parse_corpus(json.dumps(doc), strict=True)[0] is None
    corpus, issues = parse_corpus(json.dumps(doc), strict=False)
    assert corpus is not None and [i.severity for i in issues] == ["warning"]


def test_round_trip_identity():
    corpus = load_corpus(FIXTURE_CORPUS)
    text = dumps_corpus(corpus)
    again, issues = parse_corpus(text)
    assert issues == [] and again == corpus
    assert dumps_corpus(again) == text


def test_market_cap_stays_exact():
    doc = json.loads(FIXTURE_CORPUS.read_text())
    doc["assets"][9]["metadata"] = {"market_cap_usd": "CAP", "snapshot_date": "2025-11-19"}
    # Splice a raw JSON number literal so no float ever touches it.
    corpus, _ = parse_corpus(json.dumps(doc).replace('"CAP"', "123456789012.3456789"))
    assert corpus.assets[9].metadata.market_cap_usd == Decimal("123456789012.3456789")
    assert '"123456789012.3456789"' in dumps_corpus(corpus)


FAULTS = [
    ("function", "utilty"),
    ("issuer_kind", "central"),
    ("minting_type", 7),
    ("yield_source", None),
    ("redemption_mechanism", "burn"),
    ("form_of_claim", "claim"),
    ("is_stablecoin", "no"),
    ("technical_standard", "erc-20"),
]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(range(9)), st.sampled_from(FAULTS)), min_size=1, max_size=6, unique_by=lambda x: (x[0], x[1][0])))
def test_k_faults_give_at_least_k_errors(faults):
    doc = case_doc()
    for index, (key, bad) in faults:
        doc["assets"][index][key] = bad
    corpus, issues = parse_corpus(json.dumps(doc))
    assert corpus is None
    assert len(errors(issues)) >= len(faults)
    paths = {i.path for i in errors(issues)}
    for index, (key, _) in faults:
        assert f"assets[{index}].{key}" in paths


# --- holder snapshots -------------------------------------------------------


def test_parse_fixture_snapshot():
    snap = load_holder_snapshot(FIXTURES / "holders_150.csv")
    assert (snap.chain, snap.token_id, snap.snapshot_date.isoformat()) == ("ethereum", "syn-memex", "2025-11-19")
    assert len(snap.balances) == 150
    assert all(isinstance(b, Decimal) for _, b in snap.balances)


def test_negative_balance_line_number():
    snap, issues = parse_holder_snapshot("address,balance\na,5\nb,-1\n")
    assert snap is None
    assert issues[0].message == "negative balance at line 3"


def test_missing_header():
    snap, issues = parse_holder_snapshot("# version=1\na,5\n")
    assert snap is None and "missing header" in issues[0].message


def test_empty_body():
    snap, issues = parse_holder_snapshot("# version=1\naddress,balance\n")
    assert snap is None and issues[0].message == "empty body: no holder rows"


def test_all_zero_body():
    snap, issues = parse_holder_snapshot("address,balance\na,0\nb,0\n")
    assert snap is None and issues[0].message == "no strictly positive balance"


def test_unsupported_snapshot_version():
    snap, issues = parse_holder_snapshot("# version=2\naddress,balance\na,5\n")
    assert snap is None and issues[0].path == "# version"


def test_snapshot_reserialisation_is_exact():
    text = "# version=1 chain=ethereum\naddress,balance\na,600.000000000000000001\nb,399.999999999999999999\n"
    snap, _ = parse_holder_snapshot(text)
    again, _ = parse_holder_snapshot(dumps_holder_snapshot(snap))
    assert again == snap
    assert ownership_parties(again) == ownership_parties(snap) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.decimals(min_value=0, max_value=10**12, places=18), min_size=1, max_size=30).filter(lambda xs: any(x > 0 for x in xs)))
def test_snapshot_round_trip_property(amounts):
    snap = HolderSnapshot("ethereum", "t", None, tuple((f"0x{i:040x}", a) for i, a in enumerate(amounts)))
    again, issues = parse_holder_snapshot(dumps_holder_snapshot(snap))
    assert issues == [] and again == snap


def test_round_trip_preserves_classification():
    corpus = load_corpus(FIXTURE_CORPUS)
    again, _ = parse_corpus(dumps_corpus(corpus))
    assert [classify(d).to_record() for d in again.assets] == [classify(d).to_record() for d in corpus.assets]
