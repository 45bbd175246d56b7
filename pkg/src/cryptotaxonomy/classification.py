"""Derived classifications: reference category, legal verdict, TradFi analogy.

Each decision tree is a first-match rule table over a flat dictionary of
string-valued *facts* extracted from the descriptor. Evaluating a table
records every rule it tried, so a trace can be re-checked against the
descriptor later (:func:`replay`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Mapping

from .centralisation import GroupOutcome, centralisation_label, evaluate_groups, label_from_statuses
from .model import AssetDescriptor, LegalTestInputs, ReferenceCategory
from .vocab import (
    CentralisationLabel,
    Group,
    GroupStatus,
    LegalClassification,
    ReferenceKind,
    ReferenceSubtype,
    TradFiAnalogy,
)


class LegalTestsUnavailable(ValueError):
    """Raised when the legal decision procedure has no prong inputs."""


@dataclass(frozen=True)
class Condition:
    fact: str
    op: str  # "eq" | "ne" | "in"
    value: Any

    def holds(self, facts: Mapping[str, str]) -> bool:
        actual = facts[self.fact]
        if self.op == "eq":
            return actual == self.value
        if self.op == "ne":
            return actual != self.value
        if self.op == "in":
            return actual in self.value
        raise ValueError(f"unknown operator {self.op!r}")

    def __str__(self) -> str:
        if self.op == "eq":
            return f"{self.fact}={self.value}"
        if self.op == "ne":
            return f"{self.fact}≠{self.value}"
        return f"{self.fact}∈{{{','.join(self.value)}}}"


def eq(fact: str, value: str) -> Condition:
    return Condition(fact, "eq", value)


def ne(fact: str, value: str) -> Condition:
    return Condition(fact, "ne", value)


def one_of(fact: str, *values: str) -> Condition:
    return Condition(fact, "in", tuple(values))


@dataclass(frozen=True, eq=False)
class Rule:
    """One row of a first-match rule table. Rules compare by identity."""

    rule_id: str
    scope: tuple[Condition, ...]
    test: tuple[Condition, ...]
    verdict: str

    @cached_property
    def conditions(self) -> tuple[Condition, ...]:
        return self.scope + self.test

    # Rules are immutable, so the rendered strings are computed once.
    @cached_property
    def label(self) -> str:
        return ", ".join(str(c) for c in self.test) or "otherwise"

    @cached_property
    def predicate(self) -> str:
        return " ∧ ".join(str(c) for c in self.conditions) or "true"


@dataclass(frozen=True)
class TraceStep:
    dimension: str
    rule: str
    predicate: str
    result: bool
    verdict: str | None
    conditions: tuple[Condition, ...] = ()
    label: str = ""

    def explain(self) -> str:
        outcome = self.verdict if self.result else "no match"
        if self.dimension == "centralisation":
            return f"group {self.rule}: {self.predicate} → {self.verdict}"
        return f"rule {self.rule}: {self.label or self.predicate} → {outcome}"

    def to_json(self) -> dict[str, Any]:
        return {
            "dimension": self.dimension,
            "rule": self.rule,
            "predicate": self.predicate,
            "result": self.result,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class DecisionTrace:
    steps: tuple[TraceStep, ...] = ()
    verdicts: Mapping[str, str | None] = field(default_factory=dict)

    def __add__(self, other: DecisionTrace) -> DecisionTrace:
        return DecisionTrace(self.steps + other.steps, {**self.verdicts, **other.verdicts})

    def for_dimension(self, dimension: str) -> list[TraceStep]:
        return [s for s in self.steps if s.dimension == dimension]


REF_PRESENT = eq("reference", "present")
REF_ABSENT = eq("reference", "absent")
STABLE = eq("stablecoin", "yes")
NOT_STABLE = eq("stablecoin", "no")

REFERENCE_RULES: tuple[Rule, ...] = (
    Rule("1", (), (REF_ABSENT,), str(ReferenceCategory(ReferenceKind.NO_REFERENCE))),
    Rule(
        "2",
        (REF_PRESENT, STABLE),
        (eq("reference_fiat", "yes"), eq("issuer_kind", "centralised"), eq("redemption", "off_chain_issuer")),
        str(ReferenceCategory(ReferenceKind.E_MONEY_TOKEN)),
    ),
    Rule("3", (REF_PRESENT, STABLE), (), str(ReferenceCategory(ReferenceKind.ASSET_REFERENCED_TOKEN))),
    Rule(
        "4",
        (REF_PRESENT, NOT_STABLE),
        (eq("minting", "wrapped"),),
        str(ReferenceCategory(ReferenceKind.REFERENCED_NON_STABLECOIN, ReferenceSubtype.WRAPPED)),
    ),
    Rule(
        "5",
        (REF_PRESENT, NOT_STABLE),
        (eq("minting", "staking"),),
        str(ReferenceCategory(ReferenceKind.REFERENCED_NON_STABLECOIN, ReferenceSubtype.LIQUID_STAKING)),
    ),
    Rule(
        "6",
        (REF_PRESENT, NOT_STABLE),
        (),
        str(ReferenceCategory(ReferenceKind.REFERENCED_NON_STABLECOIN, ReferenceSubtype.OTHER)),
    ),
)

ANALOGY_RULES: tuple[Rule, ...] = (
    Rule("1", (REF_ABSENT,), (eq("function", "governance"),), TradFiAnalogy.VOTING_EQUITY_SHARE.value),
    Rule("2", (REF_ABSENT,), (eq("yield", "none"), eq("claim", "no_claim")), TradFiAnalogy.COMMODITY.value),
    Rule(
        "3",
        (REF_ABSENT,),
        (ne("yield", "none"), eq("distribution", "quantity_accrual")),
        TradFiAnalogy.PAYMENT_IN_KIND.value,
    ),
    Rule("4", (REF_PRESENT, STABLE), (one_of("redemption", "protocol_par", "burn_to_unlock"),), "repo"),
    Rule(
        "5",
        (REF_PRESENT, NOT_STABLE),
        (eq("yield", "none"), eq("minting", "wrapped")),
        TradFiAnalogy.DEPOSITARY_RECEIPT.value,
    ),
    Rule(
        "6",
        (REF_PRESENT, NOT_STABLE),
        (eq("distribution", "quantity_accrual"),),
        TradFiAnalogy.PASS_THROUGH_CERTIFICATE.value,
    ),
    Rule(
        "7",
        (REF_PRESENT, NOT_STABLE),
        (eq("distribution", "value_accrual"),),
        TradFiAnalogy.CAPITALISING_SHARE_CLASS.value,
    ),
    Rule("8", (), (), TradFiAnalogy.OTHER.value),
)

LEGAL_RULES: tuple[Rule, ...] = (
    Rule("1", (), (eq("howey", "met"), eq("aif", "met")), LegalClassification.FUND_AIF.value),
    Rule("2", (), (eq("howey", "met"),), LegalClassification.SECURITY_OR_FINANCIAL_INSTRUMENT.value),
    Rule("3", (), (eq("mifid", "met"),), LegalClassification.SECURITY_OR_FINANCIAL_INSTRUMENT.value),
    Rule("4", (), (STABLE,), LegalClassification.STABLE_VALUE_TOKEN.value),
    Rule("5", (), (), LegalClassification.OTHER_CRYPTO_ASSET.value),
)


def _met(flag: bool) -> str:
    return "met" if flag else "not_met"


def legal_facts(t: LegalTestInputs | None) -> dict[str, str]:
    if t is None:
        return {"howey": "n/a", "mifid": "n/a", "aif": "n/a"}
    return {"howey": _met(t.howey.met), "mifid": _met(t.mifid.met), "aif": _met(t.aif.met)}


def facts_of(d: AssetDescriptor) -> dict[str, str]:
    """Flatten the classification-relevant facets into string facts."""
    facts = {
        "reference": "present" if d.reference is not None else "absent",
        "reference_fiat": ("yes" if d.reference.is_fiat else "no") if d.reference is not None else "n/a",
        "stablecoin": "yes" if d.is_stablecoin else "no",
        "issuer_kind": d.issuer_kind.value,
        "function": d.function.value,
        "minting": d.minting_type.value,
        "yield": d.yield_source.value,
        "distribution": d.distribution_mechanism.value if d.distribution_mechanism else "unstated",
        "redemption": d.redemption_mechanism.value,
        "claim": d.form_of_claim.value,
    }
    facts.update(legal_facts(d.legal_test_inputs))
    return facts


@lru_cache(maxsize=None)
def _step(dimension: str, rule: Rule, matched: bool) -> TraceStep:
    # Steps are immutable and depend only on these three values, so they are shared.
    return TraceStep(dimension, rule.rule_id, rule.predicate, matched, rule.verdict, rule.conditions, rule.label)


def run_rules(dimension: str, rules: tuple[Rule, ...], facts: Mapping[str, str]) -> tuple[str, DecisionTrace]:
    """First-match evaluation; records each rule tried up to the match."""
    steps = []
    for rule in rules:
        matched = all(c.holds(facts) for c in rule.conditions)
        steps.append(_step(dimension, rule, matched))
        if matched:
            return rule.verdict, DecisionTrace(tuple(steps), {dimension: rule.verdict})
    raise AssertionError(f"rule table for {dimension} is not total")


def reference_category(d: AssetDescriptor) -> ReferenceCategory:
    verdict, _ = run_rules("reference_category", REFERENCE_RULES, facts_of(d))
    return ReferenceCategory.parse(verdict)


def tradfi_analogy(d: AssetDescriptor) -> tuple[TradFiAnalogy, DecisionTrace]:
    verdict, trace = run_rules("tradfi_analogy", ANALOGY_RULES, facts_of(d))
    return TradFiAnalogy(verdict), trace


def legal_classification(t: LegalTestInputs | None, is_stablecoin: bool) -> LegalClassification:
    """Howey/MiFID/AIF decision procedure.

    Fund/AIF when Howey and AIF both hold; otherwise security when Howey or
    MiFID holds; otherwise stable-value for stablecoins; otherwise other.
    """
    if t is None:
        raise LegalTestsUnavailable("legal tests unavailable")
    facts = legal_facts(t)
    facts["stablecoin"] = "yes" if is_stablecoin else "no"
    verdict, _ = run_rules("legal_classification", LEGAL_RULES, facts)
    return LegalClassification(verdict)


@dataclass(frozen=True)
class LegalCheck:
    """Outcome of comparing the explicit legal label with the derived one.

    ``status`` is one of ``match``, ``mismatch``, ``explicit`` (only the
    label is present), ``derived`` (only test inputs) or ``unclassified``.
    ``authoritative`` is the value used for reporting: the explicit label
    whenever there is one.
    """

    status: str
    explicit: LegalClassification | None
    derived: LegalClassification | None

    @property
    def authoritative(self) -> LegalClassification | None:
        return self.explicit if self.explicit is not None else self.derived


def check_explicit_legal(d: AssetDescriptor) -> LegalCheck:
    explicit = d.explicit_legal_classification
    derived = (
        legal_classification(d.legal_test_inputs, d.is_stablecoin) if d.legal_test_inputs is not None else None
    )
    if explicit is not None and derived is not None:
        status = "match" if explicit is derived else "mismatch"
    elif explicit is not None:
        status = "explicit"
    elif derived is not None:
        status = "derived"
    else:
        status = "unclassified"
    return LegalCheck(status, explicit, derived)


def _centralisation_trace(outcomes: list[GroupOutcome], label: CentralisationLabel) -> DecisionTrace:
    steps = []
    for o in outcomes:
        if o.status is GroupStatus.FAIL:
            detail = "unilateral control of " + ", ".join(f"{s.value}.{r}" for s, r in o.failing)
        elif o.status is GroupStatus.PASS:
            detail = "no resource with a single controlling party"
        else:
            detail = "not applicable"
        steps.append(TraceStep("centralisation", o.group.value, detail, o.status is not GroupStatus.FAIL, o.status.value))
    return DecisionTrace(tuple(steps), {"centralisation": label.value})


@dataclass(frozen=True)
class DerivedClassification:
    id: str
    centralisation: CentralisationLabel | None
    groups: tuple[GroupOutcome, ...] | None
    reference_category: ReferenceCategory
    legal: LegalCheck
    tradfi_analogy: TradFiAnalogy
    flags: tuple[str, ...]
    trace: DecisionTrace

    @property
    def legal_classification(self) -> LegalClassification | None:
        return self.legal.authoritative

    @property
    def has_findings(self) -> bool:
        return any(f.startswith(("fixture-inconsistency", "legal-mismatch")) for f in self.flags)

    def summary_line(self) -> str:
        return "  ".join(
            [
                self.id,
                self.centralisation.value if self.centralisation else "unclassified",
                str(self.reference_category),
                self.legal_classification.value if self.legal_classification else "unclassified",
                self.tradfi_analogy.value,
            ]
        )

    def to_record(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "centralisation": self.centralisation.value if self.centralisation else None,
            "reference_category": str(self.reference_category),
            "legal_classification": self.legal_classification.value if self.legal_classification else None,
            "tradfi_analogy": self.tradfi_analogy.value,
            "flags": list(self.flags),
            "trace": [s.to_json() for s in self.trace.steps],
        }


def classify(d: AssetDescriptor) -> DerivedClassification:
    """Derive every classification for one descriptor, with its trace."""
    facts = facts_of(d)
    trace = DecisionTrace()
    flags: list[str] = []

    groups: tuple[GroupOutcome, ...] | None = None
    label: CentralisationLabel | None = None
    if d.critical_resource_surface is None:
        flags.append("centralisation-unassessed")
        trace += DecisionTrace((), {"centralisation": None})
    else:
        groups = tuple(evaluate_groups(d.critical_resource_surface, d))
        label = centralisation_label(groups)
        trace += _centralisation_trace(list(groups), label)

    ref_verdict, ref_trace = run_rules("reference_category", REFERENCE_RULES, facts)
    trace += ref_trace

    legal = check_explicit_legal(d)
    if d.legal_test_inputs is not None:
        _, legal_trace = run_rules("legal_classification", LEGAL_RULES, facts)
        trace += legal_trace
    if legal.status == "mismatch":
        flags.append("legal-mismatch")
    elif legal.status == "unclassified":
        flags.append("legal-unclassified")
    trace += DecisionTrace((), {"legal_authoritative": legal.authoritative.value if legal.authoritative else None})

    analogy_verdict, analogy_trace = run_rules("tradfi_analogy", ANALOGY_RULES, facts)
    trace += analogy_trace

    result = DerivedClassification(
        id=d.id,
        centralisation=label,
        groups=groups,
        reference_category=ReferenceCategory.parse(ref_verdict),
        legal=legal,
        tradfi_analogy=TradFiAnalogy(analogy_verdict),
        flags=(),
        trace=trace,
    )
    if d.expected is not None:
        derived_values = {
            "centralisation": result.centralisation,
            "reference_category": result.reference_category,
            "legal_classification": result.legal_classification,
            "tradfi_analogy": result.tradfi_analogy,
        }
        for key, value in derived_values.items():
            wanted = getattr(d.expected, key)
            if wanted is not None and wanted != value:
                flags.append(f"fixture-inconsistency:{key}")
    return DerivedClassification(**{**result.__dict__, "flags": tuple(flags)})


class ReplayMismatch(AssertionError):
    pass


def replay(d: AssetDescriptor, trace: DecisionTrace) -> dict[str, str | None]:
    """Re-evaluate every recorded predicate against ``d``.

    Returns the verdict per dimension as implied by the replayed steps and
    raises :class:`ReplayMismatch` if any recorded result differs.
    """
    facts = facts_of(d)
    verdicts: dict[str, str | None] = {}
    statuses: dict[Group, GroupStatus] = {}
    if d.critical_resource_surface is not None:
        recomputed = {o.group.value: o.status for o in evaluate_groups(d.critical_resource_surface, d)}
    for step in trace.steps:
        if step.dimension == "centralisation":
            status = GroupStatus(step.verdict)
            if recomputed[step.rule] is not status:
                raise ReplayMismatch(f"group {step.rule}: recorded {status.value}, got {recomputed[step.rule].value}")
            statuses[Group(step.rule)] = status
            continue
        result = all(c.holds(facts) for c in step.conditions)
        if result != step.result:
            raise ReplayMismatch(f"{step.dimension} rule {step.rule}: recorded {step.result}, got {result}")
        if result and step.dimension not in verdicts:
            verdicts[step.dimension] = step.verdict
    if statuses:
        verdicts["centralisation"] = label_from_statuses(statuses).value
    else:
        verdicts["centralisation"] = None
    return verdicts
