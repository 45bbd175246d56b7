from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from cryptotaxonomy.cli import main

from conftest import FIXTURE_CORPUS, FIXTURES, CASE_STUDIES


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def corpus_copy(tmp_path):
    target = tmp_path / "cases.json"
    shutil.copy(CASE_STUDIES, target)
    return target


def holders(tmp_path, *amounts, name="h.csv"):
    path = tmp_path / name
    rows = "".join(f"0x{i:02x},{a}\n" for i, a in enumerate(amounts))
    path.write_text(f"# version=1 chain=ethereum\naddress,balance\n{rows}")
    return path


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", str(CASE_STUDIES))
    assert code == 0 and out.strip().endswith("9 assets valid")


def test_validate_bad_facet(capsys, write_json, raw_case):
    bad = raw_case("btc")
    bad["function"] = "utilty"
    code, out, _ = run(capsys, "validate", str(write_json({"version": 1, "assets": [bad]})))
    assert code == 1
    assert "assets[0].function" in out and "did you mean 'utility'" in out


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_usage_error_exit_code(capsys):
    assert run(capsys, "validate")[0] == 2
    assert run(capsys, "classify", str(CASE_STUDIES), "--strict", "--lenient")[0] == 2


def test_strict_env_default(capsys, monkeypatch, write_json, raw_case):
    extra = raw_case("btc")
    extra["colour"] = "orange"
    path = str(write_json({"version": 1, "assets": [extra]}))
    assert run(capsys, "validate", path)[0] == 1
    monkeypatch.setenv("TAXONOMY_STRICT", "0")
    code, out, _ = run(capsys, "validate", path)
    assert code == 0 and "warning" in out
    assert run(capsys, "validate", path, "--strict")[0] == 1
    monkeypatch.setenv("TAXONOMY_STRICT", "1")
    assert run(capsys, "validate", path, "--lenient")[0] == 0


def test_classify_lines(capsys):
    code, out, err = run(capsys, "classify", str(CASE_STUDIES))
    lines = out.splitlines()
    assert "wbtc  hybrid  referenced_non_stablecoin/wrapped  security_or_financial_instrument  depositary_receipt" in lines
    assert "dai  decentralised  asset_referenced_token  stable_value_token  repo" in lines
    # HBARX carries the published-label contradiction, which is a data finding.
    assert code == 1 and "hbarx: fixture-inconsistency:centralisation" in err


def test_classify_clean_corpus_exits_zero(capsys, write_json, raw_case):
    path = write_json({"version": 1, "assets": [raw_case("btc"), raw_case("steth")]})
    assert run(capsys, "classify", str(path))[0] == 0


def test_classify_explain(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", str(CASE_STUDIES), "--explain", "--out", str(tmp_path / "o"))
    block = out.split("[steth]")[1].split("\n[")[0].strip().splitlines()
    assert block[-1].strip() == "rule 6: distribution=quantity_accrual → pass_through_certificate"
    trace = (tmp_path / "o" / "traces" / "steth.txt").read_text().splitlines()
    assert trace[-1] == "rule 6: distribution=quantity_accrual → pass_through_certificate"
    doc = json.loads((tmp_path / "o" / "classifications.json").read_text())
    assert len(doc["assets"]) == 9


def test_report(capsys, tmp_path):
    code, out, _ = run(capsys, "report", str(CASE_STUDIES), "--out", str(tmp_path))
    assert code == 0
    assert out.splitlines()[0] == "centralisation: decentralised:6 hybrid:1 centralised:2"
    assert {p.name for p in tmp_path.iterdir()} == {
        "distributions.csv", "buckets.csv", "parallel_sets.csv", "classifications.json", "summary.md",
    }
    assert (tmp_path / "parallel_sets.csv").read_text().startswith("issuer_kind,minting_type,function,count")


def test_report_empty_corpus(capsys, write_json):
    code, out, _ = run(capsys, "report", str(write_json({"version": 1, "assets": []})))
    assert code == 0 and "decentralised:0 hybrid:0 centralised:0" in out


@pytest.mark.parametrize("dims", ["function,colour", "function"])
def test_report_bad_dims(capsys, dims):
    code, _, err = run(capsys, "report", str(CASE_STUDIES), "--dims", dims)
    assert code == 2 and "error" in err


def test_concentration(capsys, tmp_path):
    assert run(capsys, "concentration", str(holders(tmp_path, 61, 39)))[1:2] == ("top_share=61.00% parties=1\n",)
    code, out, _ = run(capsys, "concentration", str(holders(tmp_path, 60, 40)))
    assert code == 0 and out == "top_share=60.00% parties=unbounded\n"


def test_concentration_restricted_fixture(capsys):
    code, out, _ = run(capsys, "concentration", str(FIXTURES / "holders_150_restricted.csv"))
    assert out == "top_share=60.10% parties=1\n"


def test_concentration_bad_snapshot(capsys, tmp_path):
    path = tmp_path / "neg.csv"
    path.write_text("address,balance\na,5\nb,-1\n")
    code, out, _ = run(capsys, "concentration", str(path))
    assert code == 1 and "negative balance at line 3" in out


def test_write_back_requires_asset_and_corpus(capsys):
    assert run(capsys, "concentration", str(FIXTURES / "holders_150.csv"), "--write-back")[0] == 2


def test_write_back_then_classify(capsys, corpus_copy):
    before = corpus_copy.read_bytes()
    code, out, _ = run(
        capsys, "concentration", str(FIXTURES / "holders_150.csv"),
        "--asset", "dai", "--corpus", str(corpus_copy), "--write-back",
    )
    updated = corpus_copy.with_name("cases.updated.json")
    assert code == 0 and f"wrote {updated}" in out
    assert corpus_copy.read_bytes() == before  # input never mutated without --overwrite

    doc = json.loads(updated.read_text())
    dai = next(a for a in doc["assets"] if a["id"] == "dai")
    assert dai["critical_resource_surface"]["market_ownership"] == {"on_chain_holder": 1}

    run(capsys, "classify", str(updated), "--explain")
    code, out, _ = run(capsys, "classify", str(updated), "--explain")
    assert "dai  hybrid  asset_referenced_token" in out
    dai_block = out.split("[dai]")[1].split("\n[")[0]
    assert "group market: unilateral control of market_ownership.on_chain_holder → fail" in dai_block


def test_write_back_is_idempotent(capsys, corpus_copy, tmp_path):
    args = ["concentration", str(FIXTURES / "holders_150.csv"), "--asset", "btc", "--corpus"]
    out1, out2 = tmp_path / "one.json", tmp_path / "two.json"
    run(capsys, *args, str(corpus_copy), "--write-back", "--output", str(out1))
    run(capsys, *args, str(out1), "--write-back", "--output", str(out2))
    assert out1.read_bytes() == out2.read_bytes()


def test_write_back_overwrite(capsys, corpus_copy):
    run(capsys, "concentration", str(FIXTURES / "holders_150.csv"), "--asset", "btc",
        "--corpus", str(corpus_copy), "--write-back", "--overwrite")
    doc = json.loads(corpus_copy.read_text())
    assert doc["assets"][0]["critical_resource_surface"]["market_ownership"] == {"on_chain_holder": 1}


def test_write_back_unknown_asset(capsys, corpus_copy):
    code = run(capsys, "concentration", str(FIXTURES / "holders_150.csv"), "--asset", "eth",
               "--corpus", str(corpus_copy), "--write-back")[0]
    assert code == 2


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "cryptotaxonomy", "validate", str(FIXTURE_CORPUS)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip().endswith("30 assets valid")
