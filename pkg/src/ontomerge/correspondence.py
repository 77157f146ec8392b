"""Grouping pairwise mappings into multi-ontology correspondence sets.

Pairs are closed transitively (union-find), so `a=b` and `b=c` yield one
set {a, b, c}. Sets are canonically ordered: members sorted by IRI, sets
sorted by their smallest member. This makes the model independent of input
file and pair order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .core import EntityId, EntityKind, Ontology
from .errors import KindMismatchError, UnknownEntityError
from .formats import MappingFile


class CorrKind(Enum):
    CLASS = "class"
    PROPERTY = "property"
    INSTANCE = "instance"


_CORR_OF_ENTITY = {
    EntityKind.CLASS: CorrKind.CLASS,
    EntityKind.OBJECT_PROPERTY: CorrKind.PROPERTY,
    EntityKind.DATA_PROPERTY: CorrKind.PROPERTY,
    EntityKind.INSTANCE: CorrKind.INSTANCE,
}


def corr_kind_of(kind: EntityKind) -> CorrKind:
    return _CORR_OF_ENTITY[kind]


@dataclass(frozen=True)
class CorrespondenceSet:
    members: tuple[EntityId, ...]
    kind: CorrKind

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("a correspondence set needs at least two members")

    @property
    def card(self) -> int:
        return len(self.members)


def card(cs: CorrespondenceSet) -> int:
    return cs.card


@dataclass
class CorrespondenceModel:
    sets: list[CorrespondenceSet] = field(default_factory=list)
    index: dict[EntityId, int] = field(default_factory=dict)

    @classmethod
    def from_sets(cls, sets: Iterable[CorrespondenceSet]) -> "CorrespondenceModel":
        ordered = sorted(sets, key=lambda cs: cs.members[0])
        index: dict[EntityId, int] = {}
        for pos, cs in enumerate(ordered):
            for member in cs.members:
                index[member] = pos
        return cls(sets=ordered, index=index)

    def set_of(self, eid: EntityId) -> int | None:
        return self.index.get(eid)

    def class_sets(self) -> list[CorrespondenceSet]:
        return [cs for cs in self.sets if cs.kind is CorrKind.CLASS]

    def max_card(self) -> int:
        return max((cs.card for cs in self.sets), default=0)


def total_correspondences(model: CorrespondenceModel) -> int:
    """Total number of corresponding entities: the sum of all set cardinalities."""
    return sum(cs.card for cs in model.sets)


class _UnionFind:
    def __init__(self):
        self.parent: dict[EntityId, EntityId] = {}

    def find(self, x: EntityId) -> EntityId:
        parent = self.parent.setdefault(x, x)
        if parent == x:
            return x
        root = self.find(parent)
        self.parent[x] = root
        return root

    def union(self, a: EntityId, b: EntityId) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic root choice: the smaller IRI wins
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def build_model(
    ontologies: Sequence[Ontology],
    mappings: Sequence[MappingFile],
    *,
    confidence_cutoff: float = 0.0,
    drop_self_pairs: bool = False,
) -> CorrespondenceModel:
    """Close all mapping pairs into disjoint correspondence sets.

    Pairs below ``confidence_cutoff`` are dropped. Pairs within a single
    ontology (self-mappings) are closed like any other unless
    ``drop_self_pairs`` is set. Singleton groups never appear: every set
    has cardinality at least two.
    """
    kind_of: dict[EntityId, EntityKind] = {}
    home_of: dict[EntityId, str] = {}
    for onto in ontologies:
        for eid, entity in onto.entities.items():
            kind_of.setdefault(eid, entity.kind)
            home_of.setdefault(eid, onto.name)

    uf = _UnionFind()
    for mapping in mappings:
        for pair in mapping.pairs:
            if pair.confidence < confidence_cutoff:
                continue
            for eid in (pair.left, pair.right):
                if eid not in kind_of:
                    raise UnknownEntityError(
                        f"mapped entity {eid} is not declared in any source ontology"
                    )
            left_kind = corr_kind_of(kind_of[pair.left])
            right_kind = corr_kind_of(kind_of[pair.right])
            if left_kind is not right_kind:
                raise KindMismatchError(
                    f"cannot map {pair.left} ({left_kind.value}) to "
                    f"{pair.right} ({right_kind.value})"
                )
            if drop_self_pairs and home_of[pair.left] == home_of[pair.right]:
                continue
            if pair.left == pair.right:
                continue
            uf.union(pair.left, pair.right)

    groups: dict[EntityId, list[EntityId]] = {}
    for eid in uf.parent:
        groups.setdefault(uf.find(eid), []).append(eid)

    sets = []
    for members in groups.values():
        if len(members) < 2:
            continue
        sets.append(
            CorrespondenceSet(
                members=tuple(sorted(members)),
                kind=corr_kind_of(kind_of[members[0]]),
            )
        )
    return CorrespondenceModel.from_sets(sets)
