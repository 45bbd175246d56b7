"""Deterministic crypto-asset taxonomy classifier."""

from importlib.resources import files
from pathlib import Path

from .centralisation import (
    DegenerateSnapshot,
    GroupOutcome,
    StructureError,
    centralisation_label,
    evaluate_groups,
    ownership_parties,
    subdimension_passes,
    top_holder_share,
)
from .classification import (
    DecisionTrace,
    DerivedClassification,
    LegalCheck,
    LegalTestsUnavailable,
    check_explicit_legal,
    classify,
    legal_classification,
    reference_category,
    replay,
    tradfi_analogy,
)
from .corpus import Corpus, CorpusError, HolderSnapshot, load_corpus, load_holder_snapshot
from .model import (
    AssetDescriptor,
    AssetRef,
    CriticalResourceSurface,
    DescriptorError,
    Issue,
    LegalTestInputs,
    ReferenceCategory,
    parse_descriptor,
    validate_descriptor,
)
from .vocab import facet_universe

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path of a bundled fixture, e.g. ``data_path("case_studies.json")``."""
    return Path(str(files(__package__) / "data" / name))
