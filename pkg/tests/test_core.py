import random

import pytest

from ontomerge.core import (
    Axiom,
    AxiomKind,
    Entity,
    EntityId,
    EntityKind,
    Ontology,
    connectivity_counts,
    connectivity_index,
    signature,
    taxonomic_neighbors,
)
from ontomerge.errors import DuplicateDeclarationError, UnknownEntityError

from conftest import make_ontology


def test_signature_empty_ontology():
    assert signature(Ontology(name="empty")) == set()


def test_signature_direct_enumeration():
    onto = make_ontology("t", classes=["t:A", "t:B"], props=["t:p"])
    assert signature(onto) == {EntityId("t:A"), EntityId("t:B"), EntityId("t:p")}


def test_signature_conf_a_fixture(conf_a):
    # the twelve entity IRIs declared in the fixture file, enumerated by hand
    expected = {
        "a:Document",
        "a:Paper",
        "a:Review",
        "a:Person",
        "a:Author",
        "a:Reviewer",
        "a:Conference",
        "a:writes",
        "a:reviews",
        "a:title",
        "a:alice",
        "a:bob",
    }
    assert {e.iri for e in signature(conf_a)} == expected
    assert len(signature(conf_a)) == 12


def test_taxonomic_neighbors_chain():
    onto = make_ontology(
        "t",
        classes=["t:A", "t:B", "t:C"],
        axioms=[("SUBCLASS", "t:A", "t:B"), ("SUBCLASS", "t:B", "t:C")],
    )
    assert taxonomic_neighbors(onto, EntityId("t:B")) == {
        EntityId("t:A"),
        EntityId("t:C"),
    }


def test_taxonomic_neighbors_isolated():
    onto = make_ontology("t", classes=["t:X"])
    assert taxonomic_neighbors(onto, EntityId("t:X")) == set()


def test_taxonomic_neighbors_unknown_entity():
    onto = make_ontology("t", classes=["t:X"])
    with pytest.raises(UnknownEntityError):
        taxonomic_neighbors(onto, EntityId("t:Nope"))


def test_taxonomic_neighbors_conf_a_by_scan(conf_a):
    # oracle: scan the subclass axioms directly
    paper = EntityId("a:Paper")
    expected = set()
    for ax in conf_a.axioms:
        if ax.kind is AxiomKind.SUBCLASS_OF:
            if ax.subject == paper:
                expected.add(ax.objects[0])
            elif ax.objects[0] == paper:
                expected.add(ax.subject)
    assert taxonomic_neighbors(conf_a, paper) == expected == {EntityId("a:Document")}


def test_taxonomic_neighbors_symmetric(conf_a):
    classes = [e.id for e in conf_a.entities.values() if e.kind is EntityKind.CLASS]
    for c in classes:
        for other in taxonomic_neighbors(conf_a, c):
            assert c in taxonomic_neighbors(conf_a, other)


def test_connectivity_counts_toy():
    # hand-built: t:A has 3 subclass edges and 2 domain references, 6 axioms total
    onto = make_ontology(
        "t",
        classes=["t:A", "t:B", "t:C", "t:D"],
        props=["t:p", "t:q"],
        axioms=[
            ("SUBCLASS", "t:A", "t:B"),
            ("SUBCLASS", "t:C", "t:A"),
            ("SUBCLASS", "t:D", "t:A"),
            ("DOMAIN", "t:p", "t:A"),
            ("DOMAIN", "t:q", "t:A"),
            ("RANGE", "t:p", "t:B"),
        ],
    )
    assert connectivity_counts(onto, EntityId("t:A")) == (3, 2)


def test_connectivity_counts_isolated():
    onto = make_ontology("t", classes=["t:X"])
    assert connectivity_counts(onto, EntityId("t:X")) == (0, 0)


def test_connectivity_counts_union_only():
    onto = make_ontology(
        "t",
        classes=["t:U", "t:A", "t:B"],
        axioms=[("UNION", "t:U", "t:A", "t:B")],
    )
    assert connectivity_counts(onto, EntityId("t:A")) == (0, 1)


def test_connectivity_counts_sum_rule(conf_a):
    # the taxo counts over all classes add up to twice the subclass axioms
    total = 0
    for e in conf_a.entities.values():
        if e.kind is EntityKind.CLASS:
            total += connectivity_counts(conf_a, e.id)[0]
    subclass = sum(1 for ax in conf_a.axioms if ax.kind is AxiomKind.SUBCLASS_OF)
    assert total == 2 * subclass


def test_connectivity_index_matches_point_queries(conf_a):
    index = connectivity_index(conf_a)
    for e in conf_a.entities.values():
        if e.kind is EntityKind.CLASS:
            assert index[e.id] == connectivity_counts(conf_a, e.id)


def test_axiom_equality_ignores_provenance_and_flag():
    a = Axiom(AxiomKind.SUBCLASS_OF, EntityId("t:A"), (EntityId("t:B"),), "one")
    b = Axiom(
        AxiomKind.SUBCLASS_OF, EntityId("t:A"), (EntityId("t:B"),), "two", translated=True
    )
    assert a == b
    assert len({a, b}) == 1


def test_duplicate_declaration_rejected():
    onto = make_ontology("t", classes=["t:A"])
    with pytest.raises(DuplicateDeclarationError):
        onto.add_entity(Entity.declare(EntityId("t:A"), EntityKind.CLASS))


def test_axiom_referencing_unknown_entity_rejected():
    onto = make_ontology("t", classes=["t:A"])
    with pytest.raises(UnknownEntityError):
        onto.add_axiom(
            Axiom(AxiomKind.SUBCLASS_OF, EntityId("t:A"), (EntityId("t:B"),))
        )


def test_signature_closure_under_random_mutation():
    # random add/remove sequences never orphan a referenced entity
    rng = random.Random(7)
    onto = make_ontology(
        "t",
        classes=[f"t:C{i}" for i in range(8)],
        axioms=[("SUBCLASS", f"t:C{i}", f"t:C{(i + 1) % 8}") for i in range(7)],
    )
    axioms = sorted(onto.axioms, key=lambda ax: (ax.subject, ax.objects))
    removed = []
    for _ in range(60):
        if removed and rng.random() < 0.5:
            ax = removed.pop()
            onto.add_axiom(ax)
        elif axioms:
            ax = axioms.pop(rng.randrange(len(axioms)))
            onto.axioms.discard(ax)
            removed.append(ax)
        for ax in onto.axioms:
            for participant in ax.participants:
                assert participant in onto.entities
