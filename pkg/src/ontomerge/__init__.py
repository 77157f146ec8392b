"""Partition-based n-ary ontology merging with binary baselines."""

from .core import Axiom, AxiomKind, Entity, EntityId, EntityKind, Ontology
from .correspondence import CorrespondenceModel, CorrespondenceSet, build_model
from .formats import (
    MappingFile,
    MappingPair,
    parse_mapping,
    parse_ontology,
    serialize_mapping,
    serialize_ontology,
)
from .merge_model import (
    MergeModel,
    as_ontology,
    build_initial_model,
    integrate_entities,
    translate_axioms,
)
from .metrics import MergeReport, compute_report, render
from .refine import RefinementConfig, Scope
from .strategies import (
    MatrixDataset,
    OpCounters,
    Strategy,
    StrategyConfig,
    merge_balanced,
    merge_ladder,
    merge_nary,
    run_matrix,
    run_strategy,
    variant_config,
)

__version__ = "0.1.0"

__all__ = [
    "Axiom",
    "AxiomKind",
    "CorrespondenceModel",
    "CorrespondenceSet",
    "Entity",
    "EntityId",
    "EntityKind",
    "MappingFile",
    "MappingPair",
    "MatrixDataset",
    "MergeModel",
    "MergeReport",
    "OpCounters",
    "Ontology",
    "RefinementConfig",
    "Scope",
    "Strategy",
    "StrategyConfig",
    "as_ontology",
    "build_initial_model",
    "build_model",
    "compute_report",
    "integrate_entities",
    "merge_balanced",
    "merge_ladder",
    "merge_nary",
    "parse_mapping",
    "parse_ontology",
    "render",
    "run_matrix",
    "run_strategy",
    "serialize_mapping",
    "serialize_ontology",
    "translate_axioms",
    "variant_config",
]
