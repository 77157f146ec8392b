"""Domain model for ontologies: entities, axioms, and structural queries.

An ontology here is a closed terminological fragment: classes, object and
data properties, instances, and six axiom kinds (subclass, subproperty,
domain, range, union, instance typing). Richer constructs are rejected at
parse time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Protocol

from .errors import DuplicateDeclarationError, KindMismatchError, UnknownEntityError


class EntityKind(Enum):
    CLASS = "class"
    OBJECT_PROPERTY = "objprop"
    DATA_PROPERTY = "dataprop"
    INSTANCE = "instance"

    @property
    def is_property(self) -> bool:
        return self in (EntityKind.OBJECT_PROPERTY, EntityKind.DATA_PROPERTY)


class AxiomKind(Enum):
    SUBCLASS_OF = "SUBCLASS"
    SUBPROPERTY_OF = "SUBPROP"
    DOMAIN = "DOMAIN"
    RANGE = "RANGE"
    UNION_OF = "UNION"
    INSTANCE_OF = "TYPE"


# Axiom kinds counted as non-taxonomic mentions of a class.
NON_TAXONOMIC_KINDS = frozenset(
    {AxiomKind.DOMAIN, AxiomKind.RANGE, AxiomKind.UNION_OF}
)


@dataclass(frozen=True, order=True)
class EntityId:
    """Identity of an entity; the IRI string is the identity."""

    iri: str

    @property
    def origin(self) -> str:
        """Prefix of the IRI: the source ontology name, or 'merged'/'union'."""
        return self.iri.split(":", 1)[0]

    @property
    def local_name(self) -> str:
        parts = self.iri.split(":", 1)
        return parts[1] if len(parts) == 2 else parts[0]

    def __str__(self) -> str:
        return self.iri


@dataclass(frozen=True)
class Entity:
    id: EntityId
    kind: EntityKind
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError(f"entity {self.id} must carry at least one label")

    @classmethod
    def declare(cls, id: EntityId, kind: EntityKind) -> "Entity":
        """A freshly declared entity labelled with the local name of its IRI."""
        return cls(id=id, kind=kind, labels=(id.local_name,))

    def with_labels(self, labels: Iterable[str]) -> "Entity":
        return Entity(id=self.id, kind=self.kind, labels=tuple(labels))


@dataclass(frozen=True)
class Axiom:
    """A single statement; equality ignores provenance and the translated flag."""

    kind: AxiomKind
    subject: EntityId
    objects: tuple[EntityId, ...]
    provenance: str = field(compare=False, default="")
    translated: bool = field(compare=False, default=False)

    def __post_init__(self):
        if self.kind is AxiomKind.UNION_OF:
            if len(self.objects) < 2:
                raise ValueError("union axiom needs at least two members")
        elif len(self.objects) != 1:
            raise ValueError(f"{self.kind.value} axiom takes exactly one object")

    @property
    def participants(self) -> tuple[EntityId, ...]:
        return (self.subject,) + self.objects

    def rewrite(self, mapping: dict[EntityId, EntityId]) -> "Axiom | None":
        """Rewrite participants through ``mapping``; None if the result is vacuous.

        Union member lists are deduplicated after rewriting. Subclass and
        subproperty self-loops, and unions that collapse onto their subject
        or below two members, are vacuous and dropped by the caller.
        """
        subject = mapping.get(self.subject, self.subject)
        objects: list[EntityId] = []
        for obj in self.objects:
            new = mapping.get(obj, obj)
            if self.kind is AxiomKind.UNION_OF and new in objects:
                continue
            objects.append(new)
        if self.kind in (AxiomKind.SUBCLASS_OF, AxiomKind.SUBPROPERTY_OF):
            if subject == objects[0]:
                return None
        if self.kind is AxiomKind.UNION_OF:
            if subject in objects or len(objects) < 2:
                return None
        return Axiom(
            kind=self.kind,
            subject=subject,
            objects=tuple(objects),
            provenance=self.provenance,
            translated=True,
        )


class EntityStore(Protocol):
    """Anything holding an entity table and an axiom set (Ontology, MergeModel)."""

    entities: dict[EntityId, Entity]
    axioms: set[Axiom]


@dataclass
class Ontology:
    name: str
    entities: dict[EntityId, Entity] = field(default_factory=dict)
    axioms: set[Axiom] = field(default_factory=set)

    def add_entity(self, entity: Entity) -> None:
        existing = self.entities.get(entity.id)
        if existing is not None:
            if existing.kind is not entity.kind:
                raise KindMismatchError(
                    f"{entity.id} declared both as {existing.kind.value} "
                    f"and {entity.kind.value}"
                )
            raise DuplicateDeclarationError(f"duplicate declaration of {entity.id}")
        self.entities[entity.id] = entity

    def add_axiom(self, axiom: Axiom) -> None:
        for eid in axiom.participants:
            if eid not in self.entities:
                raise UnknownEntityError(
                    f"axiom references undeclared entity {eid}"
                )
        self.axioms.add(axiom)

    def kind_of(self, eid: EntityId) -> EntityKind:
        try:
            return self.entities[eid].kind
        except KeyError:
            raise UnknownEntityError(f"unknown entity {eid}") from None

    def classes(self) -> Iterator[EntityId]:
        for eid, ent in self.entities.items():
            if ent.kind is EntityKind.CLASS:
                yield eid

    def count_by_kind(self, kind: EntityKind) -> int:
        return sum(1 for e in self.entities.values() if e.kind is kind)


def signature(store: EntityStore) -> set[EntityId]:
    """All entity ids of the store."""
    return set(store.entities)


def _require_class(store: EntityStore, c: EntityId) -> None:
    entity = store.entities.get(c)
    if entity is None:
        raise UnknownEntityError(f"unknown entity {c}")
    if entity.kind is not EntityKind.CLASS:
        raise UnknownEntityError(f"{c} is not a class")


def taxonomic_neighbors(store: EntityStore, c: EntityId) -> set[EntityId]:
    """Classes directly adjacent to ``c`` through subclass axioms, either direction."""
    _require_class(store, c)
    neighbors: set[EntityId] = set()
    for ax in store.axioms:
        if ax.kind is not AxiomKind.SUBCLASS_OF:
            continue
        if ax.subject == c:
            neighbors.add(ax.objects[0])
        elif ax.objects[0] == c:
            neighbors.add(ax.subject)
    neighbors.discard(c)
    return neighbors


def connectivity_counts(store: EntityStore, c: EntityId) -> tuple[int, int]:
    """(taxonomic, non-taxonomic) axiom mention counts for class ``c``.

    Taxonomic mentions are subclass axioms touching ``c`` on either end;
    non-taxonomic mentions are domain, range, and union axioms touching it.
    Each axiom counts once.
    """
    _require_class(store, c)
    taxo = 0
    non_taxo = 0
    for ax in store.axioms:
        if c not in ax.participants:
            continue
        if ax.kind is AxiomKind.SUBCLASS_OF:
            taxo += 1
        elif ax.kind in NON_TAXONOMIC_KINDS:
            non_taxo += 1
    return taxo, non_taxo


def connectivity_index(store: EntityStore) -> dict[EntityId, tuple[int, int]]:
    """Bulk connectivity_counts for every class, in one pass over the axioms."""
    taxo: dict[EntityId, int] = {}
    non_taxo: dict[EntityId, int] = {}
    class_ids = {
        eid for eid, ent in store.entities.items() if ent.kind is EntityKind.CLASS
    }
    for ax in store.axioms:
        if ax.kind is AxiomKind.SUBCLASS_OF:
            bucket = taxo
        elif ax.kind in NON_TAXONOMIC_KINDS:
            bucket = non_taxo
        else:
            continue
        for eid in set(ax.participants):
            if eid in class_ids:
                bucket[eid] = bucket.get(eid, 0) + 1
    return {
        eid: (taxo.get(eid, 0), non_taxo.get(eid, 0)) for eid in class_ids
    }


def taxonomy_adjacency(store: EntityStore) -> dict[EntityId, set[EntityId]]:
    """Undirected adjacency over subclass axioms, restricted to classes."""
    adj: dict[EntityId, set[EntityId]] = {}
    for ax in store.axioms:
        if ax.kind is not AxiomKind.SUBCLASS_OF:
            continue
        a, b = ax.subject, ax.objects[0]
        if a == b:
            continue
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    return adj
