"""Loading and writing descriptor corpora and holder snapshots."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import logging
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any

from .model import AssetDescriptor, Issue, descriptor_to_dict, parse_descriptor

logger = logging.getLogger(__name__)

CORPUS_VERSION = 1
SNAPSHOT_VERSION = 1


class CorpusError(ValueError):
    """Corpus or snapshot could not be loaded; ``issues`` lists every finding."""

    def __init__(self, issues: list[Issue]):
        self.issues = issues
        errors = [str(i) for i in issues if i.severity == "error"]
        super().__init__("\n".join(errors) or "invalid input")


@dataclass(frozen=True)
class Provenance:
    source: str
    snapshot_date: dt.date | None = None


@dataclass(frozen=True)
class Corpus:
    version: int
    assets: tuple[AssetDescriptor, ...]
    provenance: Provenance | None = None

    def __len__(self) -> int:
        return len(self.assets)

    def get(self, asset_id: str) -> AssetDescriptor:
        for asset in self.assets:
            if asset.id == asset_id:
                return asset
        raise KeyError(asset_id)


def _parse_provenance(raw: Any, issues: list[Issue]) -> Provenance | None:
    if raw is None:
        return None
    if not isinstance(raw, dict) or not isinstance(raw.get("source"), str):
        issues.append(Issue("provenance", "expected object with string 'source'", raw))
        return None
    date = raw.get("snapshot_date")
    if date is not None:
        try:
            date = dt.date.fromisoformat(date)
        except (TypeError, ValueError):
            issues.append(Issue("provenance.snapshot_date", "expected ISO date YYYY-MM-DD", date))
            return None
    return Provenance(raw["source"], date)


def parse_corpus(text: str, *, strict: bool = True) -> tuple[Corpus | None, list[Issue]]:
    """Validate a corpus document; return ``(corpus, issues)``.

    ``corpus`` is ``None`` when any error was found: partial corpora are
    never returned.
    """
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        return None, [Issue(f"line {exc.lineno}, column {exc.colno}", f"malformed JSON: {exc.msg}")]
    if not isinstance(doc, dict):
        return None, [Issue("<root>", "corpus must be a JSON object", type(doc).__name__)]

    issues: list[Issue] = []
    version = doc.get("version")
    if isinstance(version, bool) or not isinstance(version, int):
        issues.append(Issue("version", "missing or non-integer version", version))
    elif version != CORPUS_VERSION:
        issues.append(Issue("version", f"unsupported major version (expected {CORPUS_VERSION})", version))
    for key in sorted(set(doc) - {"version", "assets", "provenance"}):
        if strict:
            issues.append(Issue(key, "unknown field"))
        else:
            issues.append(Issue(key, "unknown field ignored", severity="warning"))
    provenance = _parse_provenance(doc.get("provenance"), issues)

    raw_assets = doc.get("assets")
    if not isinstance(raw_assets, list):
        issues.append(Issue("assets", "expected a list of descriptors", raw_assets))
        raw_assets = []

    assets: list[AssetDescriptor | None] = []
    first_seen: dict[str, int] = {}
    for index, raw in enumerate(raw_assets):
        descriptor, found = parse_descriptor(raw, path=f"assets[{index}]", strict=strict)
        issues.extend(found)
        assets.append(descriptor)
        asset_id = raw.get("id") if isinstance(raw, dict) else None
        if isinstance(asset_id, str):
            if asset_id in first_seen:
                issues.append(
                    Issue(
                        f"assets[{index}].id",
                        f"duplicate id (first at assets[{first_seen[asset_id]}], again at assets[{index}])",
                        asset_id,
                    )
                )
            else:
                first_seen[asset_id] = index

    if any(i.severity == "error" for i in issues):
        return None, issues
    return Corpus(version, tuple(a for a in assets if a is not None), provenance), issues


def read_corpus(path: str | Path, *, strict: bool = True) -> tuple[Corpus | None, list[Issue]]:
    """Like :func:`parse_corpus` but from a file. I/O errors propagate as ``OSError``."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_corpus(text, strict=strict)


def load_corpus(path: str | Path, *, strict: bool = True) -> Corpus:
    """Load and fully validate a corpus file, raising :class:`CorpusError`."""
    corpus, issues = read_corpus(path, strict=strict)
    for issue in issues:
        if issue.severity == "warning":
            logger.warning("%s", issue)
    if corpus is None:
        raise CorpusError(issues)
    return corpus


def corpus_to_dict(corpus: Corpus) -> dict[str, Any]:
    out: dict[str, Any] = {"version": corpus.version}
    if corpus.provenance is not None:
        out["provenance"] = {
            "source": corpus.provenance.source,
            "snapshot_date": (
                corpus.provenance.snapshot_date.isoformat() if corpus.provenance.snapshot_date else None
            ),
        }
    out["assets"] = [descriptor_to_dict(a) for a in corpus.assets]
    return out


def dumps_corpus(corpus: Corpus) -> str:
    return json.dumps(corpus_to_dict(corpus), indent=2, ensure_ascii=False) + "\n"


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(dumps_corpus(corpus), encoding="utf-8")


@dataclass(frozen=True)
class HolderSnapshot:
    chain: str | None
    token_id: str | None
    snapshot_date: dt.date | None
    balances: tuple[tuple[str, Decimal], ...]


def _parse_sidecar(line: str, lineno: int, meta: dict[str, str], issues: list[Issue]) -> None:
    for token in line.lstrip("#").split():
        key, sep, value = token.partition("=")
        if not sep:
            issues.append(Issue(f"line {lineno}", "expected key=value in header comment", token))
            continue
        meta[key.strip()] = value.strip()


def parse_holder_snapshot(text: str) -> tuple[HolderSnapshot | None, list[Issue]]:
    """Parse an ``address,balance`` CSV with ``# key=value`` header comments.

    Balances are kept as exact decimals. Recognised comment keys are
    ``version``, ``chain``, ``token_id`` and ``snapshot_date``.
    """
    issues: list[Issue] = []
    meta: dict[str, str] = {}
    lines = text.splitlines()
    data_start = 0
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            _parse_sidecar(line, lineno, meta, issues)
            data_start = lineno
        elif line.strip():
            break
        else:
            data_start = lineno

    version = meta.get("version", str(SNAPSHOT_VERSION))
    if version.split(".")[0] != str(SNAPSHOT_VERSION):
        issues.append(Issue("# version", f"unsupported major version (expected {SNAPSHOT_VERSION})", version))
    date = None
    if "snapshot_date" in meta:
        try:
            date = dt.date.fromisoformat(meta["snapshot_date"])
        except ValueError:
            issues.append(Issue("# snapshot_date", "expected ISO date YYYY-MM-DD", meta["snapshot_date"]))

    body = lines[data_start:]
    reader = csv.reader(io.StringIO("\n".join(body)))
    header_lineno = data_start + 1
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["address", "balance"]:
        issues.append(Issue(f"line {header_lineno}", "missing header 'address,balance'", header))
        return None, issues

    balances: list[tuple[str, Decimal]] = []
    for offset, row in enumerate(reader, start=1):
        lineno = header_lineno + offset
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != 2:
            issues.append(Issue(f"line {lineno}", "expected two columns address,balance", row))
            continue
        address, raw_balance = row[0].strip(), row[1].strip()
        try:
            amount = Decimal(raw_balance)
        except InvalidOperation:
            issues.append(Issue(f"line {lineno}", "balance is not a decimal", raw_balance))
            continue
        if not amount.is_finite():
            issues.append(Issue(f"line {lineno}", "balance is not finite", raw_balance))
        elif amount < 0:
            issues.append(Issue(f"line {lineno}", f"negative balance at line {lineno}", raw_balance))
        elif not address:
            issues.append(Issue(f"line {lineno}", "empty address", row))
        else:
            balances.append((address, amount))

    if not balances and not issues:
        issues.append(Issue("body", "empty body: no holder rows"))
    elif balances and not any(b > 0 for _, b in balances):
        issues.append(Issue("body", "no strictly positive balance"))
    if issues:
        return None, issues
    return HolderSnapshot(meta.get("chain"), meta.get("token_id"), date, tuple(balances)), issues


def load_holder_snapshot(path: str | Path) -> HolderSnapshot:
    snapshot, issues = parse_holder_snapshot(Path(path).read_text(encoding="utf-8"))
    if snapshot is None:
        raise CorpusError(issues)
    return snapshot


def dumps_holder_snapshot(snapshot: HolderSnapshot) -> str:
    header = [f"version={SNAPSHOT_VERSION}"]
    if snapshot.chain:
        header.append(f"chain={snapshot.chain}")
    if snapshot.token_id:
        header.append(f"token_id={snapshot.token_id}")
    if snapshot.snapshot_date:
        header.append(f"snapshot_date={snapshot.snapshot_date.isoformat()}")
    rows = "".join(f"{address},{amount}\n" for address, amount in snapshot.balances)
    return f"# {' '.join(header)}\naddress,balance\n{rows}"
