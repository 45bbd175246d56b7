"""``taxonomy`` command line: validate, classify, report, concentration.

Exit codes: 0 success, 1 data findings (invalid descriptors, fixture
inconsistencies, legal mismatches, degenerate snapshots), 2 usage or I/O
errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Sequence

from .centralisation import DegenerateSnapshot, ownership_parties, top_holder_share
from .classification import classify
from .model import CriticalResourceSurface
from .corpus import Corpus, CorpusError, load_holder_snapshot, read_corpus, write_corpus
from .reporting import (
    BUCKET_DIMENSIONS,
    DIMENSIONS,
    ClassifiedAsset,
    UnknownDimension,
    bucket_summary,
    build_report,
    classifications_json,
)
from .vocab import SubDimension

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2
DEFAULT_DIMS = "issuer_kind,minting_type,function"


def _strict(args: argparse.Namespace) -> bool:
    if args.mode is not None:
        return args.mode == "strict"
    # Unset means strict; TAXONOMY_STRICT=0 opts into lenient parsing.
    return os.environ.get("TAXONOMY_STRICT", "1") != "0"


def _load(path: str, strict: bool, out=None) -> tuple[Corpus | None, int]:
    out = out or sys.stdout
    try:
        corpus, issues = read_corpus(path, strict=strict)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror or exc}", file=sys.stderr)
        return None, EXIT_USAGE
    for issue in issues:
        print(issue, file=out)
    if corpus is None:
        errors = sum(1 for i in issues if i.severity == "error")
        print(f"{errors} error(s); corpus rejected", file=out)
        return None, EXIT_FINDINGS
    return corpus, EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    corpus, status = _load(args.corpus, _strict(args))
    if corpus is None:
        return status
    print(f"{len(corpus)} assets valid")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    corpus, status = _load(args.corpus, _strict(args), out=sys.stderr)
    if corpus is None:
        return status
    items = [ClassifiedAsset(d, classify(d)) for d in corpus.assets]
    for item in items:
        print(item.result.summary_line())
    if args.explain:
        for item in items:
            print(f"\n[{item.id}]")
            for step in item.result.trace.steps:
                print(f"  {step.explain()}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "classifications.json").write_text(classifications_json(items), encoding="utf-8")
        if args.explain:
            traces = out / "traces"
            traces.mkdir(exist_ok=True)
            for item in items:
                lines = [step.explain() for step in item.result.trace.steps]
                (traces / f"{item.id}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    findings = [(item.id, flag) for item in items if item.result.has_findings for flag in item.result.flags]
    for asset_id, flag in findings:
        print(f"finding: {asset_id}: {flag}", file=sys.stderr)
    return EXIT_FINDINGS if findings else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    dims = [d.strip() for d in args.dims.split(",") if d.strip()]
    unknown = [d for d in dims if d not in DIMENSIONS]
    if unknown:
        print(f"error: {UnknownDimension(unknown[0])}", file=sys.stderr)
        return EXIT_USAGE
    if len(dims) < 2:
        print("error: --dims needs at least two dimensions", file=sys.stderr)
        return EXIT_USAGE
    corpus, status = _load(args.corpus, _strict(args), out=sys.stderr)
    if corpus is None:
        return status
    items = [ClassifiedAsset(d, classify(d)) for d in corpus.assets]
    bundle = build_report(items, dims)
    if args.out:
        bundle.write(args.out)
    for dim in BUCKET_DIMENSIONS:
        print(f"{dim}: {bucket_summary(items, dim)}")
    return EXIT_OK


def _percent(share) -> str:
    value = Decimal(share.numerator * 100) / Decimal(share.denominator)
    return f"{value.quantize(Decimal('0.01'), rounding=ROUND_HALF_EVEN)}%"


def cmd_concentration(args: argparse.Namespace) -> int:
    if args.write_back and not (args.asset and args.corpus):
        print("error: --write-back requires --asset and --corpus", file=sys.stderr)
        return EXIT_USAGE
    try:
        snapshot = load_holder_snapshot(args.snapshot)
    except OSError as exc:
        print(f"error: cannot read {args.snapshot}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusError as exc:
        for issue in exc.issues:
            print(issue)
        return EXIT_FINDINGS
    try:
        share = top_holder_share(snapshot)
        parties = ownership_parties(snapshot)
    except DegenerateSnapshot as exc:
        print(f"error: {exc}")
        return EXIT_FINDINGS
    print(f"top_share={_percent(share)} parties={parties if parties is not None else 'unbounded'}")
    if not args.write_back:
        return EXIT_OK

    corpus, status = _load(args.corpus, _strict(args), out=sys.stderr)
    if corpus is None:
        return status
    try:
        asset = corpus.get(args.asset)
    except KeyError:
        print(f"error: asset {args.asset!r} not in {args.corpus}", file=sys.stderr)
        return EXIT_USAGE
    surface = asset.critical_resource_surface or CriticalResourceSurface({})
    updated = dataclasses.replace(
        asset,
        critical_resource_surface=surface.with_entry(SubDimension.MARKET_OWNERSHIP, "on_chain_holder", parties),
    )
    assets = tuple(updated if a.id == asset.id else a for a in corpus.assets)
    source = Path(args.corpus)
    if args.overwrite:
        target = source
    elif args.output:
        target = Path(args.output)
    else:
        target = source.with_name(f"{source.stem}.updated{source.suffix}")
    write_corpus(Corpus(corpus.version, assets, corpus.provenance), target)
    print(f"wrote {target}")
    return EXIT_OK


def _add_mode(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--strict", dest="mode", action="store_const", const="strict",
                       help="unknown keys are errors (default; TAXONOMY_STRICT=0 flips the default)")
    group.add_argument("--lenient", dest="mode", action="store_const", const="lenient",
                       help="unknown keys are warnings")
    parser.set_defaults(mode=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taxonomy", description="Crypto-asset taxonomy classifier.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a descriptor corpus")
    p.add_argument("corpus")
    _add_mode(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="classify every asset in a corpus")
    p.add_argument("corpus")
    p.add_argument("--explain", action="store_true", help="print per-asset decision traces")
    p.add_argument("--out", help="directory for classifications.json (and traces/ with --explain)")
    _add_mode(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("report", help="write distribution, bucket and parallel-set reports")
    p.add_argument("corpus")
    p.add_argument("--dims", default=DEFAULT_DIMS, help=f"ordered parallel-set dimensions (default {DEFAULT_DIMS})")
    p.add_argument("--out", help="report bundle directory")
    _add_mode(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("concentration", help="top-holder concentration from a holder snapshot")
    p.add_argument("snapshot")
    p.add_argument("--asset")
    p.add_argument("--corpus")
    p.add_argument("--write-back", action="store_true",
                   help="write a corpus copy with market_ownership.on_chain_holder set")
    p.add_argument("--output", help="target for --write-back (default <corpus>.updated.json)")
    p.add_argument("--overwrite", action="store_true", help="with --write-back, replace the input corpus")
    _add_mode(p)
    p.set_defaults(func=cmd_concentration)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
