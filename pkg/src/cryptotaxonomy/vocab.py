"""Closed facet vocabularies for the crypto-asset taxonomy.

Every explicit facet is a ``str``-valued :class:`~enum.Enum` so that values
serialise as their lower_snake_case literal. Member order is the canonical
ordering used for reports and enumeration.
"""

from __future__ import annotations

from enum import Enum


class Facet(str, Enum):
    """Base for facet enums; ``str()`` yields the literal."""

    def __str__(self) -> str:
        return self.value


class TechnicalStandard(Facet):
    NATIVE = "native"
    ERC20 = "erc20"
    OTHER = "other"


class Function(Facet):
    GOVERNANCE = "governance"
    UTILITY = "utility"
    SECURITY = "security"
    OTHER = "other"


class IssuerKind(Facet):
    CENTRALISED = "centralised"
    PROTOCOL = "protocol"
    NONE = "none"


class MintingType(Facet):
    CONSENSUS = "consensus"
    LOCK_AND_MINT = "lock_and_mint"
    STAKING = "staking"
    WRAPPED = "wrapped"
    ALGORITHMIC_BURN_MINT = "algorithmic_burn_mint"
    EMISSION_GOVERNANCE = "emission_governance"
    PRE_MINED = "pre_mined"
    NFT = "nft"


class YieldSource(Facet):
    LENDING_BORROWING = "lending_borrowing"
    LIQUIDITY_FEES = "liquidity_fees"
    STAKING_REWARDS = "staking_rewards"
    REVENUE_SHARING = "revenue_sharing"
    INCENTIVE_EMISSIONS = "incentive_emissions"
    BURN_MINT_EQUILIBRIA = "burn_mint_equilibria"
    NONE = "none"


class DistributionMechanism(Facet):
    QUANTITY_ACCRUAL = "quantity_accrual"
    VALUE_ACCRUAL = "value_accrual"
    PRICE_ACCRUAL = "price_accrual"
    EXTERNAL_REDISTRIBUTION = "external_redistribution"
    NONE = "none"


class RedemptionMechanism(Facet):
    OFF_CHAIN_ISSUER = "off_chain_issuer"
    BURN_TO_UNLOCK = "burn_to_unlock"
    BRIDGE_BURN_RELEASE = "bridge_burn_release"
    SECONDARY_MARKET = "secondary_market"
    QUEUED_WITHDRAWAL = "queued_withdrawal"
    PROTOCOL_PAR = "protocol_par"
    CLAIM_FROM_POOL = "claim_from_pool"
    NONE = "none"


class FormOfClaim(Facet):
    PERSONAM_ISSUER_TO_ISSUER = "personam_issuer_to_issuer"
    PERSONAM_ISSUER_TO_HOLDERS = "personam_issuer_to_holders"
    PERSONAM_RESERVE_TO_ISSUER = "personam_reserve_to_issuer"
    PERSONAM_RESERVE_TO_HOLDERS = "personam_reserve_to_holders"
    # Direction-neutral: the source labels it "proceeds to issuer" but
    # describes income accruing to investors.
    REM_RESERVE = "rem_reserve"
    NO_CLAIM = "no_claim"


class LegalClassification(Facet):
    SECURITY_OR_FINANCIAL_INSTRUMENT = "security_or_financial_instrument"
    STABLE_VALUE_TOKEN = "stable_value_token"
    FUND_AIF = "fund_aif"
    OTHER_CRYPTO_ASSET = "other_crypto_asset"


class SubDimension(Facet):
    GOV_RULE_CHANGE = "gov_rule_change"
    GOV_VOTING = "gov_voting"
    MINT_AUTHORITY = "mint_authority"
    MINT_DATA_PARAM = "mint_data_param"
    YIELD_REWARD_POLICY = "yield_reward_policy"
    YIELD_OPERATOR_DISTRIBUTION = "yield_operator_distribution"
    RED_RESERVE = "red_reserve"
    RED_MECHANISM = "red_mechanism"
    MARKET_OWNERSHIP = "market_ownership"
    MARKET_EXCHANGE = "market_exchange"
    COMMUNITY_TRANSPARENCY = "community_transparency"


class Group(Facet):
    GOVERNANCE = "governance"
    MINTING = "minting"
    YIELD = "yield"
    REDEMPTION = "redemption"
    MARKET = "market"
    COMMUNITY = "community"


CORE_GROUPS = (Group.GOVERNANCE, Group.MINTING, Group.YIELD, Group.REDEMPTION)

GROUP_MEMBERS: dict[Group, tuple[SubDimension, ...]] = {
    Group.GOVERNANCE: (SubDimension.GOV_RULE_CHANGE, SubDimension.GOV_VOTING),
    Group.MINTING: (SubDimension.MINT_AUTHORITY, SubDimension.MINT_DATA_PARAM),
    Group.YIELD: (SubDimension.YIELD_REWARD_POLICY, SubDimension.YIELD_OPERATOR_DISTRIBUTION),
    Group.REDEMPTION: (SubDimension.RED_RESERVE, SubDimension.RED_MECHANISM),
    Group.MARKET: (SubDimension.MARKET_OWNERSHIP, SubDimension.MARKET_EXCHANGE),
    Group.COMMUNITY: (SubDimension.COMMUNITY_TRANSPARENCY,),
}

# Default resource names per sub-dimension (critical-resources table).
RESOURCE_VOCABULARY: dict[SubDimension, tuple[str, ...]] = {
    SubDimension.GOV_RULE_CHANGE: ("admin_keys", "upgrade_authorities", "emergency_pause_shutdown"),
    SubDimension.GOV_VOTING: ("quorum_threshold", "eligible_voters", "delegation_rules", "validator_curation"),
    SubDimension.MINT_AUTHORITY: ("mint_keys", "whitelisted_minters", "custodial_issuers"),
    SubDimension.MINT_DATA_PARAM: (
        "oracle_operators",
        "oracle_aggregators",
        "collateral_parameters",
        "liquidation_rules",
    ),
    SubDimension.YIELD_REWARD_POLICY: ("reward_rates", "emission_schedules", "fee_levels"),
    SubDimension.YIELD_OPERATOR_DISTRIBUTION: (
        "validator_operator_selection",
        "stake_allocation",
        "distribution_mechanisms",
    ),
    SubDimension.RED_RESERVE: ("reserve_custodians", "reserve_composition", "attestations_audits"),
    SubDimension.RED_MECHANISM: (
        "gatekeepers_whitelisting",
        "redemption_queues",
        "settlement_custodians",
        "freeze_blocklist_powers",
    ),
    SubDimension.MARKET_OWNERSHIP: ("on_chain_holder", "off_chain_register", "distribution_disclose"),
    SubDimension.MARKET_EXCHANGE: ("exchange_listing", "freeze_halt_controls", "designated_market_makers"),
    SubDimension.COMMUNITY_TRANSPARENCY: ("project_info", "governance_info", "operational_info"),
}


class CentralisationLabel(Facet):
    # Ordered from least to most centralised.
    DECENTRALISED = "decentralised"
    HYBRID = "hybrid"
    CENTRALISED = "centralised"

    @property
    def rank(self) -> int:
        return list(CentralisationLabel).index(self)


class GroupStatus(Facet):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"


class ReferenceKind(Facet):
    NO_REFERENCE = "no_reference"
    E_MONEY_TOKEN = "e_money_token"
    ASSET_REFERENCED_TOKEN = "asset_referenced_token"
    REFERENCED_NON_STABLECOIN = "referenced_non_stablecoin"


class ReferenceSubtype(Facet):
    WRAPPED = "wrapped"
    LIQUID_STAKING = "liquid_staking"
    OTHER = "other"


class TradFiAnalogy(Facet):
    COMMODITY = "commodity"
    VOTING_EQUITY_SHARE = "voting_equity_share"
    PAYMENT_IN_KIND = "payment_in_kind"
    REPO = "repo"
    DEPOSITARY_RECEIPT = "depositary_receipt"
    CAPITALISING_SHARE_CLASS = "capitalising_share_class"
    PASS_THROUGH_CERTIFICATE = "pass_through_certificate"
    OTHER = "other"


FACETS: dict[str, type[Facet]] = {
    "technical_standard": TechnicalStandard,
    "function": Function,
    "issuer_kind": IssuerKind,
    "minting_type": MintingType,
    "yield_source": YieldSource,
    "distribution_mechanism": DistributionMechanism,
    "redemption_mechanism": RedemptionMechanism,
    "form_of_claim": FormOfClaim,
    "legal_classification": LegalClassification,
}


def facet_universe() -> dict[str, tuple[str, ...]]:
    """Return every facet dimension mapped to its closed, ordered value set."""
    return {name: tuple(member.value for member in enum) for name, enum in FACETS.items()}
