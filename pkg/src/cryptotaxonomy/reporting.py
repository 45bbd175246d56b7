"""Corpus-level aggregation: facet distributions, bucket tables, parallel sets."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Sequence

from .classification import DerivedClassification, classify
from .corpus import Corpus
from .model import AssetDescriptor, ReferenceCategory
from .vocab import (
    CentralisationLabel,
    ReferenceKind,
    ReferenceSubtype,
    TradFiAnalogy,
    facet_universe,
)

UNCLASSIFIED = "unclassified"

EXPLICIT_DIMENSIONS = (
    "technical_standard",
    "function",
    "issuer_kind",
    "minting_type",
    "yield_source",
    "distribution_mechanism",
    "redemption_mechanism",
    "form_of_claim",
    "is_stablecoin",
)
DERIVED_DIMENSIONS = ("centralisation", "reference_category", "legal_classification", "tradfi_analogy")
DIMENSIONS = EXPLICIT_DIMENSIONS + DERIVED_DIMENSIONS
BUCKET_DIMENSIONS = ("centralisation", "tradfi_analogy")
# Dimensions whose value may legitimately be missing for an asset.
NULLABLE = frozenset({"distribution_mechanism", "centralisation", "legal_classification"})

_REFERENCE_UNIVERSE = (
    str(ReferenceCategory(ReferenceKind.NO_REFERENCE)),
    str(ReferenceCategory(ReferenceKind.E_MONEY_TOKEN)),
    str(ReferenceCategory(ReferenceKind.ASSET_REFERENCED_TOKEN)),
    *(str(ReferenceCategory(ReferenceKind.REFERENCED_NON_STABLECOIN, s)) for s in ReferenceSubtype),
)


class UnknownDimension(ValueError):
    def __init__(self, name: str, valid: Sequence[str] = DIMENSIONS):
        self.name = name
        super().__init__(f"unknown dimension {name!r}; valid: {', '.join(valid)}")


def universe(dimension: str) -> tuple[str, ...]:
    """Ordered value set for a report dimension (without ``unclassified``)."""
    facets = facet_universe()
    if dimension in facets:
        return facets[dimension]
    if dimension == "is_stablecoin":
        return ("true", "false")
    if dimension == "centralisation":
        return tuple(label.value for label in CentralisationLabel)
    if dimension == "reference_category":
        return _REFERENCE_UNIVERSE
    if dimension == "tradfi_analogy":
        return tuple(a.value for a in TradFiAnalogy)
    raise UnknownDimension(dimension)


@dataclass(frozen=True)
class ClassifiedAsset:
    descriptor: AssetDescriptor
    result: DerivedClassification

    @property
    def id(self) -> str:
        return self.descriptor.id

    def value(self, dimension: str) -> str | None:
        d, r = self.descriptor, self.result
        if dimension == "technical_standard":
            return d.technical_standard.kind.value
        if dimension == "is_stablecoin":
            return "true" if d.is_stablecoin else "false"
        if dimension in EXPLICIT_DIMENSIONS:
            facet = getattr(d, dimension)
            return facet.value if facet is not None else None
        if dimension == "centralisation":
            return r.centralisation.value if r.centralisation else None
        if dimension == "reference_category":
            return str(r.reference_category)
        if dimension == "legal_classification":
            return r.legal_classification.value if r.legal_classification else None
        if dimension == "tradfi_analogy":
            return r.tradfi_analogy.value
        raise UnknownDimension(dimension)


def classify_corpus(corpus: Corpus | Iterable[AssetDescriptor]) -> list[ClassifiedAsset]:
    assets = corpus.assets if isinstance(corpus, Corpus) else corpus
    return [ClassifiedAsset(d, classify(d)) for d in assets]


@dataclass(frozen=True)
class FacetDistribution:
    dimension: str
    counts: dict[str, int]
    total: int


def facet_distribution(items: Sequence[ClassifiedAsset], dimension: str) -> FacetDistribution:
    """Exact counts per value, including zero counts for unused values."""
    if dimension not in DIMENSIONS:
        raise UnknownDimension(dimension)
    keys = universe(dimension) + ((UNCLASSIFIED,) if dimension in NULLABLE else ())
    counts = dict.fromkeys(keys, 0)
    for item in items:
        value = item.value(dimension)
        counts[value if value is not None else UNCLASSIFIED] += 1
    return FacetDistribution(dimension, counts, len(items))


def bucket_table(items: Sequence[ClassifiedAsset], dimension: str) -> dict[str, list[str]]:
    """Asset ids per bucket; every asset lands in exactly one bucket.

    Buckets follow the dimension's universe order with a trailing
    ``unclassified`` bucket that collects assets lacking a value.
    """
    if dimension not in DERIVED_DIMENSIONS:
        raise UnknownDimension(dimension, DERIVED_DIMENSIONS)
    table: dict[str, list[str]] = {key: [] for key in universe(dimension) + (UNCLASSIFIED,)}
    for item in items:
        value = item.value(dimension)
        table[value if value is not None else UNCLASSIFIED].append(item.id)
    return table


@dataclass(frozen=True)
class ParallelSetPath:
    values: tuple[str, ...]
    count: int
    colour_value: float | None


@dataclass(frozen=True)
class ParallelSets:
    dimensions: tuple[str, ...]
    paths: tuple[ParallelSetPath, ...]
    excluded: tuple[str, ...]


def _log10_mean(caps: list[Decimal]) -> float | None:
    # Zero/absent caps are left out of the mean rather than counted as zero.
    positive = [c for c in caps if c > 0]
    if not positive:
        return None
    mean = sum(positive, Decimal(0)) / len(positive)
    return float(mean.log10())


def parallel_set_paths(items: Sequence[ClassifiedAsset], dimensions: Sequence[str]) -> ParallelSets:
    """Group assets by their value tuple along ``dimensions``.

    Colour is log10 of the arithmetic mean market cap of the path's members.
    Assets without a value on some dimension are listed in ``excluded``.
    """
    dims = tuple(dimensions)
    if len(dims) < 2:
        raise ValueError("parallel sets need at least two dimensions")
    for dim in dims:
        if dim not in DIMENSIONS:
            raise UnknownDimension(dim)

    groups: dict[tuple[str, ...], list[ClassifiedAsset]] = {}
    excluded = []
    for item in items:
        values = tuple(item.value(dim) for dim in dims)
        if any(v is None for v in values):
            excluded.append(item.id)
            continue
        groups.setdefault(values, []).append(item)

    orders = [{v: i for i, v in enumerate(universe(dim))} for dim in dims]
    paths = []
    for key in sorted(groups, key=lambda vals: tuple(order[v] for order, v in zip(orders, vals))):
        members = groups[key]
        caps = [
            m.descriptor.metadata.market_cap_usd
            for m in members
            if m.descriptor.metadata is not None and m.descriptor.metadata.market_cap_usd is not None
        ]
        paths.append(ParallelSetPath(key, len(members), _log10_mean(caps)))
    return ParallelSets(dims, tuple(paths), tuple(excluded))


def _csv(rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _colour(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def bucket_summary(items: Sequence[ClassifiedAsset], dimension: str = "centralisation") -> str:
    """One-line ``bucket:count`` summary; ``unclassified`` only when non-zero."""
    table = bucket_table(items, dimension)
    parts = []
    for bucket, ids in table.items():
        if bucket == UNCLASSIFIED and not ids:
            continue
        if dimension == "centralisation" or ids:
            parts.append(f"{bucket}:{len(ids)}")
    return " ".join(parts)


@dataclass(frozen=True)
class ReportBundle:
    distributions_csv: str
    buckets_csv: str
    parallel_sets_csv: str
    classifications_json: str
    summary_md: str

    FILES = {
        "distributions.csv": "distributions_csv",
        "buckets.csv": "buckets_csv",
        "parallel_sets.csv": "parallel_sets_csv",
        "classifications.json": "classifications_json",
        "summary.md": "summary_md",
    }

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, attr in self.FILES.items():
            path = out / name
            path.write_text(getattr(self, attr), encoding="utf-8")
            written.append(path)
        return written


def classifications_json(items: Sequence[ClassifiedAsset]) -> str:
    records = [item.result.to_record() for item in items]
    return json.dumps({"version": 1, "assets": records}, indent=2, ensure_ascii=False) + "\n"


def build_report(items: Sequence[ClassifiedAsset], dimensions: Sequence[str]) -> ReportBundle:
    """Render every report file in memory; output is byte-deterministic."""
    distributions = [facet_distribution(items, dim) for dim in DIMENSIONS]
    dist_rows: list[Sequence[object]] = [("dimension", "value", "count")]
    for dist in distributions:
        dist_rows.extend((dist.dimension, value, count) for value, count in dist.counts.items())

    bucket_rows: list[Sequence[object]] = [("dimension", "bucket", "asset_id")]
    tables = {dim: bucket_table(items, dim) for dim in BUCKET_DIMENSIONS}
    for dim, table in tables.items():
        for bucket, ids in table.items():
            bucket_rows.extend((dim, bucket, asset_id) for asset_id in ids)

    psets = parallel_set_paths(items, dimensions)
    ps_rows: list[Sequence[object]] = [(*psets.dimensions, "count", "colour_value")]
    ps_rows.extend((*p.values, p.count, _colour(p.colour_value)) for p in psets.paths)

    md = ["# Taxonomy report", "", f"Assets: {len(items)}", ""]
    for dim, table in tables.items():
        md += [f"## Buckets: {dim}", "", "| bucket | count | assets |", "|---|---:|---|"]
        md += [f"| {bucket} | {len(ids)} | {', '.join(ids)} |" for bucket, ids in table.items()]
        md.append("")
    md += ["## Facet distributions", ""]
    for dist in distributions:
        md += [f"### {dist.dimension} (total {dist.total})", "", "| value | count |", "|---|---:|"]
        md += [f"| {value} | {count} |" for value, count in dist.counts.items()]
        md.append("")
    md += [f"## Parallel sets: {' → '.join(psets.dimensions)}", ""]
    md += ["| " + " | ".join(psets.dimensions) + " | count | colour_value |"]
    md += ["|" + "---|" * len(psets.dimensions) + "---:|---:|"]
    md += [f"| {' | '.join(p.values)} | {p.count} | {_colour(p.colour_value)} |" for p in psets.paths]
    md += ["", f"Excluded (missing a path dimension): {', '.join(psets.excluded) or 'none'}"]
    flagged = [item for item in items if item.result.flags]
    if flagged:
        md += ["", "## Flags", ""]
        md += [f"- {item.id}: {', '.join(item.result.flags)}" for item in flagged]

    return ReportBundle(
        distributions_csv=_csv(dist_rows),
        buckets_csv=_csv(bucket_rows),
        parallel_sets_csv=_csv(ps_rows),
        classifications_json=classifications_json(items),
        summary_md="\n".join(md) + "\n",
    )
