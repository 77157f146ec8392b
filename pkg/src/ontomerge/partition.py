"""Partitioning phase: score pivot classes and grow disjoint blocks.

Pivots are integrated classes ranked by reputation, the product of a
weighted connectivity degree and the cardinality of the underlying
correspondence set. Each pivot seeds a block that grows over taxonomic
adjacency until its component is exhausted; pivots landing in an already
claimed component are skipped, leftover components get their own blocks,
and classes without any taxonomic edge stay outside all blocks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import (
    Axiom,
    EntityId,
    EntityKind,
    connectivity_counts,
    connectivity_index,
    taxonomy_adjacency,
)
from .correspondence import CorrespondenceModel, CorrespondenceSet
from .errors import SetNotIntegratedError
from .merge_model import MergeModel

DEFAULT_TAXO_WEIGHT = 0.75
DEFAULT_NON_TAXO_WEIGHT = 0.5


@dataclass(frozen=True)
class PivotEntry:
    cs: CorrespondenceSet
    merged: EntityId
    reputation: float


@dataclass
class PivotList:
    entries: list[PivotEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class Block:
    id: int
    classes: set[EntityId]
    axioms: set[Axiom] = field(default_factory=set)


@dataclass
class PartitionResult:
    blocks: list[Block]
    unassigned_classes: set[EntityId]

    @property
    def k(self) -> int:
        return len(self.blocks)

    def block_of(self) -> dict[EntityId, int]:
        placement: dict[EntityId, int] = {}
        for block in self.blocks:
            for c in block.classes:
                placement[c] = block.id
        return placement


def connectivity(
    model: MergeModel,
    c: EntityId,
    w_t: float = DEFAULT_TAXO_WEIGHT,
    w_nt: float = DEFAULT_NON_TAXO_WEIGHT,
) -> float:
    """Weighted degree of a class: w_t * taxonomic + w_nt * non-taxonomic mentions."""
    taxo, non_taxo = connectivity_counts(model, c)
    return w_t * taxo + w_nt * non_taxo


def _integrated_entity(model: MergeModel, cs: CorrespondenceSet) -> EntityId:
    merged = {model.integrated_of.get(m) for m in cs.members}
    if len(merged) != 1 or None in merged:
        raise SetNotIntegratedError(
            f"set {', '.join(str(m) for m in cs.members)} has not been integrated"
        )
    return merged.pop()


def reputation(
    model: MergeModel,
    cs: CorrespondenceSet,
    w_t: float = DEFAULT_TAXO_WEIGHT,
    w_nt: float = DEFAULT_NON_TAXO_WEIGHT,
) -> float:
    """Connectivity of the integrated class times the set cardinality."""
    merged = _integrated_entity(model, cs)
    return connectivity(model, merged, w_t, w_nt) * cs.card


def find_pivots(
    model: MergeModel,
    corr: CorrespondenceModel,
    w_t: float = DEFAULT_TAXO_WEIGHT,
    w_nt: float = DEFAULT_NON_TAXO_WEIGHT,
) -> PivotList:
    """All class correspondence sets, scored and sorted by descending reputation.

    Ties are broken by the smallest member IRI, ascending, so the order is
    deterministic. Property and instance sets never become pivots.
    """
    index = connectivity_index(model)
    entries = []
    for cs in corr.class_sets():
        merged = _integrated_entity(model, cs)
        taxo, non_taxo = index.get(merged, (0, 0))
        score = (w_t * taxo + w_nt * non_taxo) * cs.card
        entries.append(PivotEntry(cs=cs, merged=merged, reputation=score))
    entries.sort(key=lambda e: (-e.reputation, e.cs.members[0]))
    return PivotList(entries=entries)


def partition(model: MergeModel, pivots: PivotList) -> PartitionResult:
    """Grow one block per useful pivot, then sweep up what remains.

    A pivot whose class is already claimed, or has no taxonomic edge at
    all, creates no block. After the pivot pass, every remaining class
    with a taxonomic edge seeds a fresh block for its component, which
    guarantees that blocks plus the unassigned set cover all classes.
    """
    adjacency = taxonomy_adjacency(model)
    all_classes = {
        eid for eid, ent in model.entities.items() if ent.kind is EntityKind.CLASS
    }
    assigned: set[EntityId] = set()
    blocks: list[Block] = []

    def grow(seed: EntityId) -> None:
        block = Block(id=len(blocks) + 1, classes=set())
        queue = deque([seed])
        assigned.add(seed)
        block.classes.add(seed)
        while queue:
            current = queue.popleft()
            for neighbor in sorted(adjacency.get(current, ())):
                if neighbor in assigned or neighbor not in all_classes:
                    continue
                assigned.add(neighbor)
                block.classes.add(neighbor)
                queue.append(neighbor)
        blocks.append(block)

    for entry in pivots.entries:
        seed = entry.merged
        if seed in assigned:
            continue
        if not adjacency.get(seed):
            continue  # unconnected pivot: no block
        grow(seed)

    for c in sorted(all_classes):
        if c not in assigned and adjacency.get(c):
            grow(c)

    unassigned = {c for c in all_classes if c not in assigned}
    return PartitionResult(blocks=blocks, unassigned_classes=unassigned)


def overlap_ratio(corr: CorrespondenceModel, model: MergeModel) -> float:
    """Share of source classes that participate in any correspondence set."""
    source_classes: set[EntityId] = set()
    for onto in model.source_ontologies:
        for eid, ent in onto.entities.items():
            if ent.kind is EntityKind.CLASS:
                source_classes.add(eid)
    if not source_classes:
        return 0.0
    corresponding = set()
    for cs in corr.class_sets():
        corresponding.update(m for m in cs.members if m in source_classes)
    return len(corresponding) / len(source_classes)
