"""Combining phase: per-block sub-ontologies, then a sequential global merge.

Every axiom whose class participants sit in a single block lands in that
block's sub-ontology, dragging its properties and instances along. Axioms
whose classes span several blocks, or mix a block with unassigned space,
are deferred as distributed axioms. The inter-combination walks blocks in
order of shared distributed axioms, adds each deferred axiom as soon as
all the blocks it touches are in, and finally appends unassigned classes
and unattached entities verbatim.

With refinements disabled the result is exactly the initial merge model
again: the partition detour is semantics preserving.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import Axiom, AxiomKind, Entity, EntityId, EntityKind, Ontology
from .correspondence import CorrespondenceModel
from .merge_model import MergeModel
from .partition import PartitionResult
from .refine import RefinementConfig, RefineOutcome, Scope, apply as apply_refinements


@dataclass
class SubOntology:
    block_id: int
    ontology: Ontology


@dataclass
class DistributedAxiomSet:
    touches: dict[Axiom, frozenset[int]] = field(default_factory=dict)
    unassigned_touching: set[Axiom] = field(default_factory=set)
    carry_axioms: set[Axiom] = field(default_factory=set)

    @property
    def axioms(self) -> set[Axiom]:
        return set(self.touches)

    def taxonomic_count(self) -> int:
        """Distributed axioms of is-a character (subclass or union)."""
        return sum(
            1
            for ax in self.touches
            if ax.kind in (AxiomKind.SUBCLASS_OF, AxiomKind.UNION_OF)
        )


def assign_axioms(
    model: MergeModel, part: PartitionResult
) -> tuple[list[SubOntology], DistributedAxiomSet]:
    """Place every axiom in exactly one destination.

    Destinations are: one block (all class participants inside it), the
    distributed set (classes across blocks or into unassigned space), or
    the carry set (no class participant in any block at all).
    """
    placement = part.block_of()
    per_block: dict[int, set[Axiom]] = {b.id: set() for b in part.blocks}
    dist = DistributedAxiomSet()

    for ax in model.axioms:
        blocks_touched: set[int] = set()
        touches_unassigned = False
        for p in set(ax.participants):
            if model.entities[p].kind is not EntityKind.CLASS:
                continue
            bid = placement.get(p)
            if bid is None:
                touches_unassigned = True
            else:
                blocks_touched.add(bid)
        if not blocks_touched:
            dist.carry_axioms.add(ax)
        elif len(blocks_touched) == 1 and not touches_unassigned:
            per_block[next(iter(blocks_touched))].add(ax)
        else:
            dist.touches[ax] = frozenset(blocks_touched)
            if touches_unassigned:
                dist.unassigned_touching.add(ax)

    subs: list[SubOntology] = []
    for block in part.blocks:
        entities: dict[EntityId, Entity] = {
            c: model.entities[c] for c in block.classes
        }
        axioms = per_block[block.id]
        for ax in axioms:
            for p in ax.participants:
                entities.setdefault(p, model.entities[p])
        block.axioms = set(axioms)
        subs.append(
            SubOntology(
                block_id=block.id,
                ontology=Ontology(
                    name=f"block_{block.id}", entities=entities, axioms=set(axioms)
                ),
            )
        )
    return subs, dist


def inter_relatedness(d: DistributedAxiomSet, i: int, j: int) -> int:
    """Number of distributed axioms shared by blocks i and j."""
    return sum(1 for touched in d.touches.values() if i in touched and j in touched)


def refine_blocks(
    subs: Sequence[SubOntology],
    model: MergeModel,
    config: RefinementConfig,
    corr: CorrespondenceModel | None = None,
    jobs: int = 1,
) -> RefineOutcome:
    """Run local refinement on every sub-ontology; blocks are independent.

    With jobs > 1 the blocks are refined concurrently; each worker owns
    its block outright, so the outcome is identical to the serial run.
    """

    def refine_one(sub: SubOntology) -> RefineOutcome:
        view = MergeModel(
            entities=sub.ontology.entities,
            axioms=sub.ontology.axioms,
            integrated_of=model.integrated_of,
            source_ontologies=model.source_ontologies,
        )
        return apply_refinements(
            config, Scope.LOCAL, view, model.source_ontologies, corr
        )

    total = RefineOutcome()
    if jobs > 1 and len(subs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(refine_one, subs))
    else:
        outcomes = [refine_one(sub) for sub in subs]
    for outcome in outcomes:
        total.extend(outcome)
    return total


@dataclass
class InterStats:
    reattached: int = 0
    merge_order: list[int] = field(default_factory=list)
    global_outcome: RefineOutcome | None = None


def inter_combine(
    model: MergeModel,
    subs: Sequence[SubOntology],
    dist: DistributedAxiomSet,
    part: PartitionResult,
    global_refiner: Callable[[MergeModel], RefineOutcome] | None = None,
) -> tuple[MergeModel, InterStats]:
    """Sequentially merge the blocks, most related first.

    The first step joins the pair of blocks sharing the most distributed
    axioms; afterwards the block most related to the merged mass joins
    next, ties going to the lowest block id. Blocks unrelated to
    everything are imported directly in id order. Each deferred axiom is
    added exactly once, at the step where its last touched block arrives;
    axioms into unassigned space wait for the final append.
    """
    final = MergeModel(
        integrated_of=dict(model.integrated_of),
        source_ontologies=model.source_ontologies,
    )
    stats = InterStats()
    sub_by_id = {sub.block_id: sub for sub in subs}
    pending: dict[Axiom, frozenset[int]] = {
        ax: touched
        for ax, touched in dist.touches.items()
        if ax not in dist.unassigned_touching
    }
    waiting = dict(dist.touches)  # drives the ordering (attachable or not)
    merged_ids: set[int] = set()

    def add_block(bid: int) -> None:
        sub = sub_by_id[bid]
        final.entities.update(sub.ontology.entities)
        final.axioms.update(sub.ontology.axioms)
        merged_ids.add(bid)
        stats.merge_order.append(bid)
        for ax in [a for a, t in pending.items() if t <= merged_ids]:
            final.axioms.add(ax)
            stats.reattached += 1
            del pending[ax]
            del waiting[ax]

    remaining = {sub.block_id for sub in subs}
    while remaining:
        if not merged_ids:
            best: tuple[int, int, int] | None = None  # (-rel, i, j)
            for i in sorted(remaining):
                for j in sorted(remaining):
                    if j <= i:
                        continue
                    rel = inter_relatedness(dist, i, j)
                    key = (-rel, i, j)
                    if best is None or key < best:
                        best = key
            if best is not None and -best[0] > 0:
                add_block(best[1])
                remaining.discard(best[1])
                add_block(best[2])
                remaining.discard(best[2])
            else:
                first = min(remaining)
                add_block(first)
                remaining.discard(first)
        else:
            scores = {}
            for j in remaining:
                scores[j] = sum(
                    1
                    for touched in waiting.values()
                    if j in touched and touched & merged_ids
                )
            nxt = min(remaining, key=lambda j: (-scores[j], j))
            add_block(nxt)
            remaining.discard(nxt)

    assert not pending, "a distributed axiom was never re-attached"

    # unassigned classes, deferred unassigned-space axioms, and entities
    # no axiom ever pulled into a block
    for c in part.unassigned_classes:
        final.entities[c] = model.entities[c]
    for ax in sorted(
        dist.unassigned_touching, key=lambda a: (a.kind.value, a.subject, a.objects)
    ):
        for p in ax.participants:
            final.entities.setdefault(p, model.entities[p])
        final.axioms.add(ax)
        stats.reattached += 1
    for ax in dist.carry_axioms:
        for p in ax.participants:
            final.entities.setdefault(p, model.entities[p])
        final.axioms.add(ax)
    mentioned = {p for ax in model.axioms for p in ax.participants}
    for eid, entity in model.entities.items():
        if entity.kind is EntityKind.CLASS or eid in mentioned:
            continue
        final.entities.setdefault(eid, entity)

    if global_refiner is not None:
        stats.global_outcome = global_refiner(final)
    return final, stats
