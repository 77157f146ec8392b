"""Initialization phase: build the working merge model from the sources.

The phase has three steps. `build_initial_model` loads the disjoint union
of all source entities and axioms. `integrate_entities` replaces each
correspondence set with one fresh `merged:<k>` entity carrying the union
of the member labels. `translate_axioms` rewrites every axiom that
mentions a replaced entity onto the integrated entity, collapsing
duplicates and dropping axioms that become self-referential.

The model that results can itself be used as a merge result (the naive,
partition-free path exposed by `as_ontology`); the partition and combine
phases must reproduce exactly that signature and axiom set when
refinements are disabled.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .core import Axiom, Entity, EntityId, EntityKind, Ontology
from .correspondence import CorrKind, CorrespondenceModel
from .errors import DuplicateDeclarationError, KindMismatchError, UnknownEntityError

MERGED_PREFIX = "merged"


@dataclass
class MergeModel:
    entities: dict[EntityId, Entity] = field(default_factory=dict)
    axioms: set[Axiom] = field(default_factory=set)
    integrated_of: dict[EntityId, EntityId] = field(default_factory=dict)
    source_ontologies: tuple[Ontology, ...] = ()
    combine_count: int = 0
    translate_count: int = 0
    discarded_count: int = 0

    @property
    def sources(self) -> list[str]:
        return [o.name for o in self.source_ontologies]

    def kind_of(self, eid: EntityId) -> EntityKind:
        try:
            return self.entities[eid].kind
        except KeyError:
            raise UnknownEntityError(f"unknown entity {eid}") from None


def _axiom_sort_key(ax: Axiom):
    return (ax.kind.value, ax.subject, ax.objects)


def build_initial_model(ontologies: Sequence[Ontology]) -> MergeModel:
    """Disjoint union of the sources; no integration has happened yet."""
    names = [o.name for o in ontologies]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateDeclarationError(
            f"source ontology names must be distinct, got duplicates: {dupes}"
        )
    model = MergeModel(source_ontologies=tuple(ontologies))
    for onto in ontologies:
        for eid, entity in onto.entities.items():
            existing = model.entities.get(eid)
            if existing is None:
                model.entities[eid] = entity
            elif existing.kind is not entity.kind:
                raise KindMismatchError(
                    f"{eid} is a {existing.kind.value} in one source and a "
                    f"{entity.kind.value} in another"
                )
            else:
                # identical IRI declared by several sources: keep one entity,
                # accumulating any new labels
                merged_labels = list(existing.labels)
                for lab in entity.labels:
                    if lab not in merged_labels:
                        merged_labels.append(lab)
                model.entities[eid] = existing.with_labels(merged_labels)
        for ax in sorted(onto.axioms, key=_axiom_sort_key):
            model.axioms.add(ax)
    return model


def merged_id_allocator(start: int = 1) -> Iterator[EntityId]:
    """Fresh `merged:<k>` ids; share one allocator across sequential merge steps."""
    return (EntityId(f"{MERGED_PREFIX}:{k}") for k in itertools.count(start))


def integrate_entities(
    model: MergeModel,
    corr: CorrespondenceModel,
    *,
    allocator: Iterator[EntityId] | None = None,
) -> MergeModel:
    """Replace each correspondence set with one fresh integrated entity.

    Sets are processed in their canonical order, so the fresh ids are
    deterministic. Labels of the integrated entity are the union of the
    member labels, in sorted-member order.
    """
    if allocator is None:
        allocator = merged_id_allocator()
    for cs in corr.sets:
        for member in cs.members:
            if member not in model.entities:
                raise UnknownEntityError(
                    f"correspondence member {member} is not in the merge model"
                )
        merged_id = next(allocator)
        labels: list[str] = []
        member_kinds: list[EntityKind] = []
        for member in cs.members:
            entity = model.entities.pop(member)
            member_kinds.append(entity.kind)
            for lab in entity.labels:
                if lab not in labels:
                    labels.append(lab)
            model.integrated_of[member] = merged_id
        if cs.kind is CorrKind.CLASS:
            kind = EntityKind.CLASS
        elif cs.kind is CorrKind.INSTANCE:
            kind = EntityKind.INSTANCE
        else:
            kind = member_kinds[0]  # smallest member decides obj vs data property
        model.entities[merged_id] = Entity(id=merged_id, kind=kind, labels=tuple(labels))
        model.combine_count += 1
    return model


def translate_axioms(model: MergeModel) -> MergeModel:
    """Rewrite axioms onto integrated entities; count each rewritten axiom.

    Rewrites that produce an axiom already present collapse into it; rewrites
    that produce a self-referential axiom are dropped and counted separately.
    Either way the rewrite itself counts toward the translation total.
    """
    mapping = model.integrated_of
    if not mapping:
        return model
    result: dict[Axiom, Axiom] = {}

    def keep(ax: Axiom) -> None:
        present = result.get(ax)
        if present is None:
            result[ax] = ax
        elif ax.translated and not present.translated:
            result[ax] = ax

    for ax in sorted(model.axioms, key=_axiom_sort_key):
        if any(p in mapping for p in ax.participants):
            model.translate_count += 1
            rewritten = ax.rewrite(mapping)
            if rewritten is None:
                model.discarded_count += 1
            else:
                keep(rewritten)
        else:
            keep(ax)
    model.axioms = set(result.values())
    return model


def as_ontology(model: MergeModel, name: str = "merged") -> Ontology:
    """View the model as a plain ontology (the naive, direct merge result)."""
    return Ontology(name=name, entities=dict(model.entities), axioms=set(model.axioms))
