"""Asset descriptor records, structural validation and JSON encoding."""

from __future__ import annotations

import datetime as dt
import difflib
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from types import MappingProxyType
from typing import Any, Mapping

from .vocab import (
    RESOURCE_VOCABULARY,
    CentralisationLabel,
    DistributionMechanism,
    Facet,
    FormOfClaim,
    Function,
    IssuerKind,
    LegalClassification,
    MintingType,
    RedemptionMechanism,
    ReferenceKind,
    ReferenceSubtype,
    SubDimension,
    TechnicalStandard,
    TradFiAnalogy,
    YieldSource,
)


@dataclass(frozen=True)
class Issue:
    """One validation finding, addressed by a JSON-style field path."""

    path: str
    message: str
    value: Any = None
    severity: str = "error"

    def __str__(self) -> str:
        text = f"{self.severity}: {self.path}: {self.message}"
        if self.value is not None:
            text += f" (value={self.value!r})"
        return text


class DescriptorError(ValueError):
    """Raised when a descriptor (or a batch of them) fails validation."""

    def __init__(self, issues: list[Issue]):
        self.issues = [i for i in issues if i.severity == "error"]
        super().__init__("; ".join(str(i) for i in self.issues) or "invalid descriptor")


@dataclass(frozen=True)
class AssetRef:
    symbol: str
    is_fiat: bool = False


@dataclass(frozen=True)
class Standard:
    """Technical standard; ``other`` may carry a free-form label (e.g. ``hts``)."""

    kind: TechnicalStandard
    label: str | None = None

    def __str__(self) -> str:
        if self.kind is TechnicalStandard.OTHER and self.label:
            return f"other:{self.label}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> Standard:
        head, sep, label = text.partition(":")
        kind = TechnicalStandard(head)
        if sep and kind is not TechnicalStandard.OTHER:
            raise ValueError(f"only 'other' takes a label, got {text!r}")
        return cls(kind, label or None)


@dataclass(frozen=True)
class HoweyProngs:
    investment_of_money: bool
    common_enterprise: bool
    expectation_of_profits: bool
    efforts_of_others: bool

    @property
    def met(self) -> bool:
        return (
            self.investment_of_money
            and self.common_enterprise
            and self.expectation_of_profits
            and self.efforts_of_others
        )


@dataclass(frozen=True)
class MifidProngs:
    profits_or_repayment: bool
    claim_against_identifiable_issuer: bool

    @property
    def met(self) -> bool:
        return self.profits_or_repayment and self.claim_against_identifiable_issuer


@dataclass(frozen=True)
class AifProngs:
    pooled_risk_return: bool
    defined_investment_policy: bool
    investor_benefit: bool

    @property
    def met(self) -> bool:
        return self.pooled_risk_return and self.defined_investment_policy and self.investor_benefit


@dataclass(frozen=True)
class LegalTestInputs:
    howey: HoweyProngs
    mifid: MifidProngs
    aif: AifProngs


_PRONG_TYPES: dict[str, type] = {"howey": HoweyProngs, "mifid": MifidProngs, "aif": AifProngs}


@dataclass(frozen=True)
class Metadata:
    market_cap_usd: Decimal | None = None
    snapshot_date: dt.date | None = None


@dataclass(frozen=True)
class ReferenceCategory:
    kind: ReferenceKind
    subtype: ReferenceSubtype | None = None

    def __post_init__(self) -> None:
        if (self.kind is ReferenceKind.REFERENCED_NON_STABLECOIN) != (self.subtype is not None):
            raise ValueError("subtype is required exactly for referenced_non_stablecoin")

    def __str__(self) -> str:
        if self.subtype is None:
            return self.kind.value
        return f"{self.kind.value}/{self.subtype.value}"

    @classmethod
    def parse(cls, text: str) -> ReferenceCategory:
        head, _, sub = text.partition("/")
        return cls(ReferenceKind(head), ReferenceSubtype(sub) if sub else None)


def _freeze(entries: Mapping[SubDimension, Mapping[str, int | None]]) -> Mapping:
    return MappingProxyType({k: MappingProxyType(dict(v)) for k, v in entries.items()})


@dataclass(frozen=True, eq=False)
class CriticalResourceSurface:
    """Sub-dimension -> {resource: minimum independent controlling parties}.

    ``None`` as a party count means no bounded number of controllers could be
    identified.
    """

    entries: Mapping[SubDimension, Mapping[str, int | None]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", _freeze(self.entries))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CriticalResourceSurface):
            return NotImplemented
        return self.to_json() == other.to_json()

    def get(self, sub: SubDimension) -> Mapping[str, int | None]:
        return self.entries.get(sub, MappingProxyType({}))

    def with_entry(self, sub: SubDimension, resource: str, parties: int | None) -> CriticalResourceSurface:
        data = {k: dict(v) for k, v in self.entries.items()}
        data.setdefault(sub, {})[resource] = parties
        return CriticalResourceSurface(data)

    def to_json(self) -> dict[str, dict[str, int | None]]:
        # Canonical sub-dimension order; resources keep insertion order.
        return {s.value: dict(self.entries[s]) for s in SubDimension if s in self.entries}


@dataclass(frozen=True)
class Expected:
    """Labels printed next to a published case; used only for cross-checks."""

    centralisation: CentralisationLabel | None = None
    reference_category: ReferenceCategory | None = None
    legal_classification: LegalClassification | None = None
    tradfi_analogy: TradFiAnalogy | None = None


@dataclass(frozen=True)
class AssetDescriptor:
    id: str
    symbol: str
    technical_standard: Standard
    function: Function
    issuer_kind: IssuerKind
    minting_type: MintingType
    yield_source: YieldSource
    distribution_mechanism: DistributionMechanism | None
    redemption_mechanism: RedemptionMechanism
    form_of_claim: FormOfClaim
    is_stablecoin: bool
    critical_resource_surface: CriticalResourceSurface | None
    reference: AssetRef | None = None
    name: str | None = None
    explicit_legal_classification: LegalClassification | None = None
    legal_test_inputs: LegalTestInputs | None = None
    metadata: Metadata | None = None
    expected: Expected | None = None


FIELD_ORDER = (
    "id",
    "symbol",
    "name",
    "technical_standard",
    "function",
    "issuer_kind",
    "minting_type",
    "yield_source",
    "distribution_mechanism",
    "reference",
    "is_stablecoin",
    "redemption_mechanism",
    "form_of_claim",
    "explicit_legal_classification",
    "legal_test_inputs",
    "critical_resource_surface",
    "metadata",
    "expected",
)
REQUIRED_FIELDS = frozenset(
    {
        "id",
        "symbol",
        "technical_standard",
        "function",
        "issuer_kind",
        "minting_type",
        "yield_source",
        "redemption_mechanism",
        "form_of_claim",
        "is_stablecoin",
        "critical_resource_surface",
    }
)
_ENUM_FIELDS: dict[str, type[Facet]] = {
    "function": Function,
    "issuer_kind": IssuerKind,
    "minting_type": MintingType,
    "yield_source": YieldSource,
    "distribution_mechanism": DistributionMechanism,
    "redemption_mechanism": RedemptionMechanism,
    "form_of_claim": FormOfClaim,
    "explicit_legal_classification": LegalClassification,
}


class _Collector:
    def __init__(self, prefix: str):
        self.prefix = prefix
        self.issues: list[Issue] = []

    def path(self, *parts: str) -> str:
        return ".".join(p for p in (self.prefix, *parts) if p)

    def error(self, path: str, message: str, value: Any = None) -> None:
        self.issues.append(Issue(path, message, value))

    def warn(self, path: str, message: str, value: Any = None) -> None:
        self.issues.append(Issue(path, message, value, severity="warning"))


def _hint(value: str, choices: list[str]) -> str:
    close = difflib.get_close_matches(value, choices, n=1, cutoff=0.6)
    return f" (did you mean {close[0]!r}?)" if close else ""


def _parse_enum(c: _Collector, raw: Mapping, key: str, enum: type[Facet], path: str | None = None):
    value = raw.get(key)
    path = path or c.path(key)
    if not isinstance(value, str):
        c.error(path, f"expected one of {[m.value for m in enum]}", value)
        return None
    try:
        return enum(value)
    except ValueError:
        choices = [m.value for m in enum]
        c.error(path, f"unknown literal{_hint(value, choices)}", value)
        return None


def _parse_bool(c: _Collector, value: Any, path: str) -> bool | None:
    if not isinstance(value, bool):
        c.error(path, "expected boolean", value)
        return None
    return value


def _parse_reference(c: _Collector, value: Any) -> AssetRef | None:
    path = c.path("reference")
    if not isinstance(value, Mapping):
        c.error(path, "expected object {symbol, is_fiat} or null", value)
        return None
    for extra in sorted(set(value) - {"symbol", "is_fiat"}):
        c.error(f"{path}.{extra}", "unknown field")
    symbol = value.get("symbol")
    ok = True
    if not isinstance(symbol, str) or not symbol or any(ch.isspace() for ch in symbol):
        c.error(f"{path}.symbol", "symbol must be non-empty without whitespace", symbol)
        ok = False
    is_fiat = _parse_bool(c, value.get("is_fiat"), f"{path}.is_fiat")
    if not ok or is_fiat is None:
        return None
    return AssetRef(symbol, is_fiat)


def _parse_legal_inputs(c: _Collector, value: Any) -> LegalTestInputs | None:
    path = c.path("legal_test_inputs")
    if not isinstance(value, Mapping):
        c.error(path, "expected object with howey, mifid, aif", value)
        return None
    for extra in sorted(set(value) - set(_PRONG_TYPES)):
        c.error(f"{path}.{extra}", "unknown field")
    parts: dict[str, Any] = {}
    for test, cls in _PRONG_TYPES.items():
        block = value.get(test)
        if not isinstance(block, Mapping):
            c.error(f"{path}.{test}", "missing test record", block)
            continue
        names = list(cls.__dataclass_fields__)
        for extra in sorted(set(block) - set(names)):
            c.error(f"{path}.{test}.{extra}", "unknown prong")
        prongs = {}
        for name in names:
            if name not in block:
                c.error(f"{path}.{test}.{name}", "prong must be set explicitly")
                continue
            prongs[name] = _parse_bool(c, block[name], f"{path}.{test}.{name}")
        if len(prongs) == len(names) and None not in prongs.values():
            parts[test] = cls(**prongs)
    if len(parts) != len(_PRONG_TYPES):
        return None
    return LegalTestInputs(**parts)


def _parse_surface(c: _Collector, value: Any) -> CriticalResourceSurface | None:
    path = c.path("critical_resource_surface")
    if not isinstance(value, Mapping):
        c.error(path, "expected object mapping sub-dimensions to resources", value)
        return None
    entries: dict[SubDimension, dict[str, int | None]] = {}
    ok = True
    for key, resources in value.items():
        try:
            sub = SubDimension(key)
        except ValueError:
            c.error(f"{path}.{key}", f"unknown sub-dimension{_hint(key, [s.value for s in SubDimension])}", key)
            ok = False
            continue
        if not isinstance(resources, Mapping):
            c.error(f"{path}.{key}", "expected object {resource: parties}", resources)
            ok = False
            continue
        parsed: dict[str, int | None] = {}
        for name, parties in resources.items():
            rpath = f"{path}.{key}.{name}"
            if parties is not None and (isinstance(parties, bool) or not isinstance(parties, int) or parties < 1):
                c.error(rpath, "party count must be a positive integer or null", parties)
                ok = False
                continue
            if name not in RESOURCE_VOCABULARY[sub]:
                c.warn(rpath, "resource name not in default vocabulary", name)
            parsed[name] = parties
        entries[sub] = parsed
    return CriticalResourceSurface(entries) if ok else None


def _parse_decimal(value: Any) -> Decimal | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, Decimal)):
        return Decimal(value)
    if isinstance(value, str):
        try:
            return Decimal(value)
        except InvalidOperation:
            return None
    return None


def _parse_date(value: Any) -> dt.date | None:
    if not isinstance(value, str):
        return None
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        return None


def _parse_metadata(c: _Collector, value: Any) -> Metadata | None:
    path = c.path("metadata")
    if not isinstance(value, Mapping):
        c.error(path, "expected object", value)
        return None
    for extra in sorted(set(value) - {"market_cap_usd", "snapshot_date"}):
        c.error(f"{path}.{extra}", "unknown field")
    cap = date = None
    ok = True
    if value.get("market_cap_usd") is not None:
        cap = _parse_decimal(value["market_cap_usd"])
        if cap is None or not cap.is_finite() or cap < 0:
            c.error(f"{path}.market_cap_usd", "expected non-negative decimal", value["market_cap_usd"])
            ok = False
    if value.get("snapshot_date") is not None:
        date = _parse_date(value["snapshot_date"])
        if date is None:
            c.error(f"{path}.snapshot_date", "expected ISO date YYYY-MM-DD", value["snapshot_date"])
            ok = False
    return Metadata(cap, date) if ok else None


_EXPECTED_PARSERS = {
    "centralisation": CentralisationLabel,
    "reference_category": ReferenceCategory.parse,
    "legal_classification": LegalClassification,
    "tradfi_analogy": TradFiAnalogy,
}


def _parse_expected(c: _Collector, value: Any) -> Expected | None:
    path = c.path("expected")
    if not isinstance(value, Mapping):
        c.error(path, "expected object", value)
        return None
    out = {}
    ok = True
    for key, item in value.items():
        parser = _EXPECTED_PARSERS.get(key)
        if parser is None:
            c.error(f"{path}.{key}", "unknown field")
            ok = False
            continue
        if item is None:
            continue
        try:
            out[key] = parser(item)
        except (ValueError, TypeError):
            c.error(f"{path}.{key}", "unknown literal", item)
            ok = False
    return Expected(**out) if ok else None


def parse_descriptor(
    raw: Any, *, path: str = "", strict: bool = True
) -> tuple[AssetDescriptor | None, list[Issue]]:
    """Validate ``raw`` completely and return ``(descriptor, issues)``.

    Every field is checked even after the first failure, so the issue list is
    exhaustive for the record. ``descriptor`` is ``None`` iff any issue has
    severity ``error``. Unknown keys are errors when ``strict`` and warnings
    otherwise.
    """
    c = _Collector(path)
    if not isinstance(raw, Mapping):
        c.error(path or "<root>", "descriptor must be a JSON object", raw)
        return None, c.issues

    for key in sorted(set(raw) - set(FIELD_ORDER)):
        if strict:
            c.error(c.path(key), "unknown field")
        else:
            c.warn(c.path(key), "unknown field ignored")
    for key in sorted(REQUIRED_FIELDS - set(raw)):
        c.error(c.path(key), "missing required field")

    values: dict[str, Any] = {}

    asset_id = raw.get("id")
    if "id" in raw:
        if not isinstance(asset_id, str) or not asset_id.strip():
            c.error(c.path("id"), "id must be a non-empty string", asset_id)
        else:
            values["id"] = asset_id
    symbol = raw.get("symbol")
    if "symbol" in raw:
        if not isinstance(symbol, str) or not symbol or any(ch.isspace() for ch in symbol):
            c.error(c.path("symbol"), "symbol must be non-empty without whitespace", symbol)
        else:
            values["symbol"] = symbol
    name = raw.get("name")
    if name is not None and not isinstance(name, str):
        c.error(c.path("name"), "expected string or null", name)
    values["name"] = name if isinstance(name, str) else None

    if "technical_standard" in raw:
        ts = raw["technical_standard"]
        try:
            if not isinstance(ts, str):
                raise ValueError
            values["technical_standard"] = Standard.parse(ts)
        except ValueError:
            choices = [m.value for m in TechnicalStandard]
            hint = _hint(ts, choices) if isinstance(ts, str) else ""
            c.error(c.path("technical_standard"), f"unknown literal{hint}", ts)

    for key, enum in _ENUM_FIELDS.items():
        if key not in raw:
            continue
        if raw[key] is None and key in ("distribution_mechanism", "explicit_legal_classification"):
            values[key] = None
            continue
        parsed = _parse_enum(c, raw, key, enum)
        if parsed is not None:
            values[key] = parsed
    for key in ("distribution_mechanism", "explicit_legal_classification"):
        if key not in raw:
            values[key] = None

    if "is_stablecoin" in raw:
        flag = _parse_bool(c, raw["is_stablecoin"], c.path("is_stablecoin"))
        if flag is not None:
            values["is_stablecoin"] = flag

    ref_ok = True
    if raw.get("reference") is not None:
        ref = _parse_reference(c, raw["reference"])
        ref_ok = ref is not None
        values["reference"] = ref
    else:
        values["reference"] = None

    if "critical_resource_surface" in raw:
        if raw["critical_resource_surface"] is None:
            values["critical_resource_surface"] = None
        else:
            surface = _parse_surface(c, raw["critical_resource_surface"])
            if surface is not None:
                values["critical_resource_surface"] = surface

    for key, parser in (
        ("legal_test_inputs", _parse_legal_inputs),
        ("metadata", _parse_metadata),
        ("expected", _parse_expected),
    ):
        if raw.get(key) is not None:
            parsed = parser(c, raw[key])
            if parsed is not None:
                values[key] = parsed
        else:
            values[key] = None

    # Cross-field invariants, checked only where the inputs themselves parsed.
    ys, dm = values.get("yield_source"), values.get("distribution_mechanism")
    if ys is not None and dm is not None:
        if (ys is YieldSource.NONE) != (dm is DistributionMechanism.NONE):
            c.error(
                c.path("distribution_mechanism"),
                "yield/distribution mismatch: yield_source is none iff distribution_mechanism is none",
                f"{ys.value}/{dm.value}",
            )
    has_ref = values.get("reference") is not None
    if ref_ok and not has_ref:
        if values.get("is_stablecoin") is True:
            c.error(c.path("reference"), "stablecoin requires reference", None)
        rm = values.get("redemption_mechanism")
        if rm is not None and rm is not RedemptionMechanism.NONE:
            c.error(c.path("reference"), "redemption requires reference", rm.value)
    ik, mt = values.get("issuer_kind"), values.get("minting_type")
    if ik is IssuerKind.NONE and mt is not None and mt not in (MintingType.CONSENSUS, MintingType.PRE_MINED):
        c.error(c.path("minting_type"), "issuer none requires consensus or pre_mined minting", mt.value)

    if any(i.severity == "error" for i in c.issues):
        return None, c.issues
    return AssetDescriptor(**values), c.issues


def validate_descriptor(raw: Any, *, strict: bool = True) -> AssetDescriptor:
    """Return a validated descriptor or raise :class:`DescriptorError`."""
    descriptor, issues = parse_descriptor(raw, strict=strict)
    if descriptor is None:
        raise DescriptorError(issues)
    return descriptor


def _legal_to_json(t: LegalTestInputs) -> dict[str, dict[str, bool]]:
    return {
        name: {f: getattr(getattr(t, name), f) for f in cls.__dataclass_fields__}
        for name, cls in _PRONG_TYPES.items()
    }


def descriptor_to_dict(d: AssetDescriptor) -> dict[str, Any]:
    """Encode a descriptor as a JSON-ready dict in canonical field order."""
    out: dict[str, Any] = {
        "id": d.id,
        "symbol": d.symbol,
        "name": d.name,
        "technical_standard": str(d.technical_standard),
        "function": d.function.value,
        "issuer_kind": d.issuer_kind.value,
        "minting_type": d.minting_type.value,
        "yield_source": d.yield_source.value,
        "distribution_mechanism": d.distribution_mechanism.value if d.distribution_mechanism else None,
        "reference": {"symbol": d.reference.symbol, "is_fiat": d.reference.is_fiat} if d.reference else None,
        "is_stablecoin": d.is_stablecoin,
        "redemption_mechanism": d.redemption_mechanism.value,
        "form_of_claim": d.form_of_claim.value,
        "explicit_legal_classification": (
            d.explicit_legal_classification.value if d.explicit_legal_classification else None
        ),
        "legal_test_inputs": _legal_to_json(d.legal_test_inputs) if d.legal_test_inputs else None,
        "critical_resource_surface": (
            d.critical_resource_surface.to_json() if d.critical_resource_surface is not None else None
        ),
    }
    if d.metadata is not None:
        out["metadata"] = {
            "market_cap_usd": str(d.metadata.market_cap_usd) if d.metadata.market_cap_usd is not None else None,
            "snapshot_date": d.metadata.snapshot_date.isoformat() if d.metadata.snapshot_date else None,
        }
    if d.expected is not None:
        out["expected"] = {
            key: str(getattr(d.expected, key))
            for key in _EXPECTED_PARSERS
            if getattr(d.expected, key) is not None
        }
    return out
