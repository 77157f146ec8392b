"""Top-level merge drivers with full operation accounting.

Three strategies are provided. The n-ary driver merges all sources in a
single pass through the pipeline (initialize, partition, combine). The
binary drivers fold the sources two at a time: the ladder merges each
next source into the running intermediate, the balanced driver pairs
sources into a tournament tree. Binary steps reuse the same pipeline on
two inputs; the pairwise correspondences for a step are projected from
the one global correspondence model through the integration record, so
all strategies see semantically identical correspondences and the
comparison isolates the strategy itself.

Counters follow every run: integrated sets (combine), corresponding
entities (cor), axiom rewrites (tr), rewrites plus re-attachments
(reconst), refinement actions (r_local, r_global), emitted results
(output), and merge processes (merges).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

from .combine import (
    DistributedAxiomSet,
    SubOntology,
    assign_axioms,
    inter_combine,
    refine_blocks,
)
from .core import EntityId, Ontology
from .correspondence import (
    CorrespondenceModel,
    CorrespondenceSet,
    build_model,
    total_correspondences,
)
from .errors import MergeToolError
from .formats import MappingFile
from .merge_model import (
    MergeModel,
    as_ontology,
    build_initial_model,
    integrate_entities,
    merged_id_allocator,
    translate_axioms,
)
from .partition import PartitionResult, find_pivots, partition
from .refine import (
    RefinementConfig,
    RefineOutcome,
    Scope,
    apply as apply_refinements,
    resolve_image,
)


class Strategy(Enum):
    NARY = "nary"
    LADDER = "ladder"
    BALANCED = "balanced"


@dataclass
class OpCounters:
    combine: int = 0
    reconst: int = 0
    output: int = 0
    cor: int = 0
    tr: int = 0
    r_local: int = 0
    r_global: int = 0
    merges: int = 0
    wall_ms: float = 0.0
    discarded: int = 0


@dataclass
class StrategyConfig:
    strategy: Strategy = Strategy.NARY
    refinement: RefinementConfig = field(default_factory=RefinementConfig)
    weights: tuple[float, float] = (0.75, 0.5)
    variant_id: str | None = None
    mapping_type: str = "perfect"
    jobs: int = 1
    confidence_cutoff: float = 0.0
    drop_self_pairs: bool = False


# variant grid: strategy, mapping flavour, global refinement, local refinement
_VARIANTS: dict[str, tuple[Strategy, str, bool, bool]] = {
    "V1": (Strategy.NARY, "perfect", True, True),
    "V2": (Strategy.NARY, "perfect", True, False),
    "V3": (Strategy.NARY, "perfect", False, False),
    "V4": (Strategy.NARY, "imperfect", True, True),
    "V5": (Strategy.NARY, "imperfect", True, False),
    "V6": (Strategy.NARY, "imperfect", False, False),
    "V7": (Strategy.BALANCED, "imperfect", True, True),
    "V8": (Strategy.BALANCED, "imperfect", True, False),
    "V9": (Strategy.BALANCED, "imperfect", False, False),
    "V10": (Strategy.LADDER, "imperfect", True, True),
    "V11": (Strategy.LADDER, "imperfect", True, False),
    "V12": (Strategy.LADDER, "imperfect", False, False),
}

ALL_VARIANTS = tuple(_VARIANTS)


def variant_config(
    variant_id: str,
    weights: tuple[float, float] = (0.75, 0.5),
    jobs: int = 1,
    rules: frozenset | None = None,
) -> StrategyConfig:
    """The strategy and refinement flags encoded by a variant id (V1..V12)."""
    try:
        strategy, mapping_type, apply_global, apply_local = _VARIANTS[variant_id]
    except KeyError:
        raise MergeToolError(
            f"unknown variant {variant_id!r}; expected V1..V12"
        ) from None
    refinement = RefinementConfig(
        enabled_rules=rules if rules is not None else RefinementConfig().enabled_rules,
        apply_local=apply_local,
        apply_global=apply_global,
    )
    return StrategyConfig(
        strategy=strategy,
        refinement=refinement,
        weights=weights,
        variant_id=variant_id,
        mapping_type=mapping_type,
        jobs=jobs,
    )


@dataclass
class RunResult:
    model: MergeModel
    counters: OpCounters
    corr: CorrespondenceModel
    partition: PartitionResult
    distributed: DistributedAxiomSet
    subs: list[SubOntology]
    conflicts: list[str]
    config: StrategyConfig


def _run_pipeline(
    ontologies: Sequence[Ontology],
    corr: CorrespondenceModel,
    config: StrategyConfig,
    allocator: Iterator[EntityId],
    counters: OpCounters,
) -> tuple[MergeModel, PartitionResult, DistributedAxiomSet, list[SubOntology], list[str]]:
    """One initialize/partition/combine pass; shared by all strategies."""
    model = build_initial_model(ontologies)
    integrate_entities(model, corr, allocator=allocator)
    translate_axioms(model)
    counters.combine += model.combine_count
    counters.cor += total_correspondences(corr)
    counters.tr += model.translate_count
    counters.discarded += model.discarded_count

    w_t, w_nt = config.weights
    pivots = find_pivots(model, corr, w_t, w_nt)
    part = partition(model, pivots)
    subs, dist = assign_axioms(model, part)

    conflicts: list[str] = []
    if config.refinement.apply_local and config.refinement.enabled_rules:
        outcome = refine_blocks(subs, model, config.refinement, corr, jobs=config.jobs)
        counters.r_local += len(outcome.actions)
        conflicts.extend(outcome.conflicts)

    global_refiner = None
    if config.refinement.apply_global and config.refinement.enabled_rules:

        def global_refiner(final: MergeModel) -> RefineOutcome:
            return apply_refinements(
                config.refinement, Scope.GLOBAL, final, model.source_ontologies, corr
            )

    final, stats = inter_combine(model, subs, dist, part, global_refiner=global_refiner)
    counters.reconst += model.translate_count + stats.reattached
    if stats.global_outcome is not None:
        counters.r_global += len(stats.global_outcome.actions)
        conflicts.extend(stats.global_outcome.conflicts)
    return final, part, dist, subs, conflicts


def merge_nary(
    ontologies: Sequence[Ontology],
    mappings: Sequence[MappingFile],
    config: StrategyConfig | None = None,
    corr: CorrespondenceModel | None = None,
) -> RunResult:
    """Merge all sources in one step through the partition pipeline."""
    if not ontologies:
        raise MergeToolError("need at least one ontology")
    config = config or StrategyConfig()
    if corr is None:
        corr = build_model(
            ontologies,
            mappings,
            confidence_cutoff=config.confidence_cutoff,
            drop_self_pairs=config.drop_self_pairs,
        )
    counters = OpCounters()
    started = time.perf_counter()
    final, part, dist, subs, conflicts = _run_pipeline(
        ontologies, corr, config, merged_id_allocator(), counters
    )
    counters.output = 1
    counters.merges = 1
    counters.wall_ms = (time.perf_counter() - started) * 1000.0
    return RunResult(
        model=final,
        counters=counters,
        corr=corr,
        partition=part,
        distributed=dist,
        subs=subs,
        conflicts=conflicts,
        config=config,
    )


def _binary_merge(
    ontologies: Sequence[Ontology],
    mappings: Sequence[MappingFile],
    config: StrategyConfig,
    pairing: Strategy,
    corr: CorrespondenceModel | None = None,
) -> RunResult:
    if len(ontologies) < 2:
        raise MergeToolError("binary strategies need at least two ontologies")
    if corr is None:
        corr = build_model(
            ontologies,
            mappings,
            confidence_cutoff=config.confidence_cutoff,
            drop_self_pairs=config.drop_self_pairs,
        )
    counters = OpCounters()
    started = time.perf_counter()

    member_to_set: dict[EntityId, int] = dict(corr.index)
    alias: dict[EntityId, EntityId] = {}
    allocator = merged_id_allocator()
    last: tuple[MergeModel, PartitionResult, DistributedAxiomSet, list[SubOntology]] | None = None
    conflicts: list[str] = []

    def project(left: Ontology, right: Ontology) -> CorrespondenceModel:
        """Pairwise correspondences for one step, derived from the global sets."""
        present: dict[int, list[EntityId]] = {}
        for onto in (left, right):
            for eid in onto.entities:
                gidx = member_to_set.get(eid)
                if gidx is not None:
                    present.setdefault(gidx, []).append(eid)
        sets = [
            CorrespondenceSet(tuple(sorted(members)), corr.sets[gidx].kind)
            for gidx, members in present.items()
            if len(members) >= 2
        ]
        return CorrespondenceModel.from_sets(sets)

    def step(left: Ontology, right: Ontology) -> Ontology:
        nonlocal last
        step_corr = project(left, right)
        final, part, dist, subs, step_conflicts = _run_pipeline(
            [left, right], step_corr, config, allocator, counters
        )
        conflicts.extend(step_conflicts)
        for member, merged in final.integrated_of.items():
            gidx = member_to_set.get(member)
            if gidx is not None:
                member_to_set[merged] = gidx
            alias[member] = merged
        counters.output += 1
        counters.merges += 1
        last = (final, part, dist, subs)
        return as_ontology(final, name=f"({left.name}+{right.name})")

    if pairing is Strategy.LADDER:
        acc = ontologies[0]
        for nxt in ontologies[1:]:
            acc = step(acc, nxt)
    else:
        queue = list(ontologies)
        while len(queue) > 1:
            next_round: list[Ontology] = []
            for i in range(0, len(queue) - 1, 2):
                next_round.append(step(queue[i], queue[i + 1]))
            if len(queue) % 2:
                next_round.append(queue[-1])
            queue = next_round

    assert last is not None
    final_step, part, dist, subs = last
    resolved = {
        member: resolve_image(alias, member) for member in corr.index
    }
    final_model = MergeModel(
        entities=final_step.entities,
        axioms=final_step.axioms,
        integrated_of=resolved,
        source_ontologies=tuple(ontologies),
    )
    counters.wall_ms = (time.perf_counter() - started) * 1000.0
    return RunResult(
        model=final_model,
        counters=counters,
        corr=corr,
        partition=part,
        distributed=dist,
        subs=subs,
        conflicts=conflicts,
        config=config,
    )


def merge_ladder(
    ontologies: Sequence[Ontology],
    mappings: Sequence[MappingFile],
    config: StrategyConfig | None = None,
    corr: CorrespondenceModel | None = None,
) -> RunResult:
    """Fold left: each source is merged into the running intermediate."""
    config = config or StrategyConfig(strategy=Strategy.LADDER)
    return _binary_merge(ontologies, mappings, config, Strategy.LADDER, corr)


def merge_balanced(
    ontologies: Sequence[Ontology],
    mappings: Sequence[MappingFile],
    config: StrategyConfig | None = None,
    corr: CorrespondenceModel | None = None,
) -> RunResult:
    """Tournament tree: sources are paired up round by round."""
    config = config or StrategyConfig(strategy=Strategy.BALANCED)
    return _binary_merge(ontologies, mappings, config, Strategy.BALANCED, corr)


_DRIVERS = {
    Strategy.NARY: merge_nary,
    Strategy.LADDER: merge_ladder,
    Strategy.BALANCED: merge_balanced,
}


def run_strategy(
    ontologies: Sequence[Ontology],
    mappings: Sequence[MappingFile],
    config: StrategyConfig,
) -> RunResult:
    return _DRIVERS[config.strategy](ontologies, mappings, config)


@dataclass
class MatrixDataset:
    name: str
    ontologies: list[Ontology]
    perfect_mappings: list[MappingFile]
    imperfect_mappings: list[MappingFile] | None = None

    def mappings_for(self, mapping_type: str) -> list[MappingFile]:
        if mapping_type == "imperfect" and self.imperfect_mappings is not None:
            return self.imperfect_mappings
        return self.perfect_mappings


def run_matrix(
    datasets: Sequence[MatrixDataset],
    variants: Sequence[str] = ALL_VARIANTS,
    weights: tuple[float, float] = (0.75, 0.5),
    jobs: int = 1,
    rules: frozenset | None = None,
    confidence_cutoff: float = 0.0,
    drop_self_pairs: bool = False,
):
    """One report per (dataset, variant); failures are recorded, not fatal.

    The variant fixes strategy, mapping flavour, and where refinement runs;
    `rules` narrows which repair rules are enabled within that frame.
    """
    from .metrics import compute_report

    reports = []
    errors: list[tuple[str, str, str]] = []
    for dataset in datasets:
        for variant_id in variants:
            config = variant_config(
                variant_id, weights=weights, jobs=jobs, rules=rules
            )
            config.confidence_cutoff = confidence_cutoff
            config.drop_self_pairs = drop_self_pairs
            try:
                result = run_strategy(
                    dataset.ontologies,
                    dataset.mappings_for(config.mapping_type),
                    config,
                )
                reports.append(compute_report(result, dataset.name, variant_id))
            except MergeToolError as exc:
                errors.append((dataset.name, variant_id, str(exc)))
    return reports, errors
