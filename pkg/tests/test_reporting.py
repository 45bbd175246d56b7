from __future__ import annotations

import dataclasses
import json
import math
from collections import Counter
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryptotaxonomy.model import Metadata
from cryptotaxonomy.reporting import (
    DERIVED_DIMENSIONS,
    DIMENSIONS,
    UNCLASSIFIED,
    UnknownDimension,
    bucket_summary,
    bucket_table,
    build_report,
    classify_corpus,
    facet_distribution,
    parallel_set_paths,
)

from conftest import CASE_STUDIES, raw_assets


@pytest.fixture(scope="module")
def case_items(case_corpus):
    return classify_corpus(case_corpus)


@pytest.fixture(scope="module")
def fixture_items(fixture_corpus):
    return classify_corpus(fixture_corpus)


def test_technical_standard_counts_match_hand_count(case_items):
    # Oracle: count the raw JSON strings directly, keeping only the kind before ':'.
    hand = Counter(a["technical_standard"].split(":")[0] for a in raw_assets(CASE_STUDIES).values())
    dist = facet_distribution(case_items, "technical_standard")
    assert dist.counts == {"native": hand["native"], "erc20": hand["erc20"], "other": hand["other"]}
    assert dist.counts == {"native": 3, "erc20": 5, "other": 1}
    assert dist.total == 9


def test_distribution_includes_zero_counts_and_unclassified(case_items):
    dist = facet_distribution(case_items, "distribution_mechanism")
    assert dist.counts["price_accrual"] == 0
    assert dist.counts[UNCLASSIFIED] == 1  # HBARX states no distribution
    assert sum(dist.counts.values()) == dist.total


def test_unknown_dimension_lists_valid_names(case_items):
    with pytest.raises(UnknownDimension, match="valid: technical_standard"):
        facet_distribution(case_items, "colour")


def test_case_study_buckets(case_items):
    table = bucket_table(case_items, "centralisation")
    assert {k: set(v) for k, v in table.items()} == {
        "decentralised": {"btc", "uni", "hbar", "dai", "steth", "hbarx"},
        "hybrid": {"wbtc"},
        "centralised": {"cbeth", "xrp"},
        UNCLASSIFIED: set(),
    }
    analogy = bucket_table(case_items, "tradfi_analogy")
    assert analogy["commodity"] == ["btc", "xrp"]
    assert analogy["repo"] == ["dai"]
    assert analogy["other"] == ["hbarx"]
    assert bucket_summary(case_items) == "decentralised:6 hybrid:1 centralised:2"


def test_buckets_only_for_derived_dimensions(case_items):
    with pytest.raises(UnknownDimension):
        bucket_table(case_items, "function")


def test_empty_corpus():
    assert bucket_summary([]) == "decentralised:0 hybrid:0 centralised:0"
    assert facet_distribution([], "function").total == 0
    bundle = build_report([], ["issuer_kind", "function"])
    assert bundle.parallel_sets_csv == "issuer_kind,function,count,colour_value\n"


def test_single_asset(case_items):
    one = case_items[:1]
    paths = parallel_set_paths(one, ["issuer_kind", "function"]).paths
    assert [(p.values, p.count, p.colour_value) for p in paths] == [(("none", "utility"), 1, None)]


def with_cap(item, cap):
    d = dataclasses.replace(item.descriptor, metadata=Metadata(cap, None))
    return dataclasses.replace(item, descriptor=d)


def test_path_colour_is_log_of_mean_cap(case_items):
    btc, hbar = case_items[0], case_items[2]
    items = [with_cap(btc, Decimal("1e9")), with_cap(dataclasses.replace(btc), Decimal("1e11")), hbar]
    psets = parallel_set_paths(items, ["function", "minting_type"])
    by_values = {p.values: p for p in psets.paths}
    assert by_values[("utility", "consensus")].count == 2
    assert by_values[("utility", "consensus")].colour_value == pytest.approx(math.log10(5.05e10), abs=1e-9)
    assert by_values[("utility", "pre_mined")].colour_value is None


def test_paths_need_two_dimensions(case_items):
    with pytest.raises(ValueError):
        parallel_set_paths(case_items, ["function"])


def test_nullable_dimension_excludes_assets(fixture_items):
    psets = parallel_set_paths(fixture_items, ["centralisation", "tradfi_analogy"])
    assert set(psets.excluded) == {"syn-unassessed-a", "syn-unassessed-b"}
    assert sum(p.count for p in psets.paths) + len(psets.excluded) == len(fixture_items)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.sampled_from(DIMENSIONS), min_size=2, max_size=4, unique=True),
    st.lists(st.integers(0, 29), max_size=30),
)
def test_paths_match_grouping_oracle(fixture_items, dims, picks):
    items = [fixture_items[i] for i in picks]
    psets = parallel_set_paths(items, dims)
    oracle = Counter()
    for item in items:
        key = tuple(item.value(d) for d in dims)
        if None not in key:
            oracle[key] += 1
    assert {p.values: p.count for p in psets.paths} == dict(oracle)
    assert sum(oracle.values()) + len(psets.excluded) == len(items)


def test_conservation_on_fixture_corpus(fixture_items):
    for dim in DIMENSIONS:
        dist = facet_distribution(fixture_items, dim)
        assert sum(dist.counts.values()) == dist.total == 30
    for dim in DERIVED_DIMENSIONS:
        table = bucket_table(fixture_items, dim)
        ids = [i for bucket in table.values() for i in bucket]
        assert sorted(ids) == sorted(item.id for item in fixture_items)
    assert bucket_table(fixture_items, "centralisation")[UNCLASSIFIED] == ["syn-unassessed-a", "syn-unassessed-b"]


def test_report_is_byte_deterministic(fixture_corpus, tmp_path):
    dims = ["issuer_kind", "minting_type", "function"]
    first = build_report(classify_corpus(fixture_corpus), dims)
    second = build_report(classify_corpus(fixture_corpus), dims)
    assert first == second
    written = first.write(tmp_path / "a")
    second.write(tmp_path / "b")
    for path in written:
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()


def test_classifications_json_shape(case_items):
    doc = json.loads(build_report(case_items, ["issuer_kind", "function"]).classifications_json)
    assert doc["version"] == 1
    record = doc["assets"][4]
    assert record["id"] == "wbtc" and record["centralisation"] == "hybrid"
    assert record["trace"][0]["dimension"] == "centralisation"
