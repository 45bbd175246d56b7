"""Minimum Decentralisation Test over the critical-resource surface.

A sub-dimension fails when any of its resources can be exercised by a single
party (``j == 1``). Sub-dimensions roll up into six functional groups, and the
group statuses determine the asset's centralisation label.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .model import AssetDescriptor, CriticalResourceSurface
from .vocab import (
    CORE_GROUPS,
    GROUP_MEMBERS,
    CentralisationLabel,
    Group,
    GroupStatus,
    RedemptionMechanism,
    SubDimension,
    YieldSource,
)

OWNERSHIP_THRESHOLD = Fraction(60, 100)
TOP_HOLDERS = 100


class StructureError(ValueError):
    """Outcome list does not contain exactly one entry per group."""


class DegenerateSnapshot(ValueError):
    """Holder snapshot is empty or has no positive balance."""


@dataclass(frozen=True)
class GroupOutcome:
    group: Group
    status: GroupStatus
    failing: tuple[tuple[SubDimension, str], ...] = ()

    def __post_init__(self) -> None:
        if (self.status is GroupStatus.FAIL) != bool(self.failing):
            raise ValueError("status is fail iff failing resources are listed")


def subdimension_passes(entries: Mapping[str, int | None]) -> bool:
    """True unless some resource is controlled by exactly one party."""
    return not any(j == 1 for j in entries.values())


def _applicable(group: Group, surface: CriticalResourceSurface, d: AssetDescriptor) -> bool:
    if group in (Group.GOVERNANCE, Group.MINTING):
        return True
    if group is Group.YIELD:
        return d.yield_source is not YieldSource.NONE
    if group is Group.REDEMPTION:
        return d.reference is not None or d.redemption_mechanism is not RedemptionMechanism.NONE
    return any(surface.get(sub) for sub in GROUP_MEMBERS[group])


def evaluate_groups(surface: CriticalResourceSurface, descriptor: AssetDescriptor) -> list[GroupOutcome]:
    """Return one outcome per group, in canonical group order."""
    outcomes = []
    for group in Group:
        if not _applicable(group, surface, descriptor):
            outcomes.append(GroupOutcome(group, GroupStatus.NOT_APPLICABLE))
            continue
        failing = tuple(
            (sub, resource)
            for sub in GROUP_MEMBERS[group]
            for resource, j in surface.get(sub).items()
            if j == 1
        )
        outcomes.append(GroupOutcome(group, GroupStatus.FAIL if failing else GroupStatus.PASS, failing))
    return outcomes


def centralisation_label(outcomes: Iterable[GroupOutcome]) -> CentralisationLabel:
    """Aggregate group outcomes into a label.

    Decentralised when every applicable group passes; centralised when every
    applicable core group (governance, minting, yield, redemption) fails;
    hybrid otherwise.
    """
    by_group: dict[Group, GroupStatus] = {}
    for outcome in outcomes:
        if outcome.group in by_group:
            raise StructureError(f"duplicate outcome for group {outcome.group.value}")
        by_group[outcome.group] = outcome.status
    return label_from_statuses(by_group)


def label_from_statuses(statuses: Mapping[Group, GroupStatus]) -> CentralisationLabel:
    missing = [g.value for g in Group if g not in statuses]
    if missing:
        raise StructureError(f"missing outcomes for groups: {', '.join(missing)}")
    applicable = [s for s in statuses.values() if s is not GroupStatus.NOT_APPLICABLE]
    if all(s is GroupStatus.PASS for s in applicable):
        return CentralisationLabel.DECENTRALISED
    core = [statuses[g] for g in CORE_GROUPS if statuses[g] is not GroupStatus.NOT_APPLICABLE]
    if core and all(s is GroupStatus.FAIL for s in core):
        return CentralisationLabel.CENTRALISED
    return CentralisationLabel.HYBRID


def _amounts(holdings: Any) -> list[Decimal | int]:
    # Accepts a HolderSnapshot (``.balances`` of (address, amount)) or bare amounts.
    if hasattr(holdings, "balances"):
        return [amount for _, amount in holdings.balances]
    return list(holdings)


def top_holder_share(holdings: Any) -> Fraction:
    """Exact share of the largest balance among the top-100 balances."""
    balances = _amounts(holdings)
    if not balances:
        raise DegenerateSnapshot("degenerate snapshot: no holders")
    if any(b < 0 for b in balances):
        raise DegenerateSnapshot("degenerate snapshot: negative balance")
    top = sorted((Fraction(b) for b in balances), reverse=True)[:TOP_HOLDERS]
    total = sum(top)
    if total == 0:
        raise DegenerateSnapshot("degenerate snapshot: all balances are zero")
    return top[0] / total


def ownership_parties(holdings: Any) -> int | None:
    """Return 1 when one holder has strictly more than 60% of the top-100 supply.

    ``None`` means no bounded number of controlling parties was identified.
    """
    return 1 if top_holder_share(holdings) > OWNERSHIP_THRESHOLD else None
