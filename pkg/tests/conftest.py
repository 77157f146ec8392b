from pathlib import Path

import pytest

from ontomerge.core import Axiom, AxiomKind, Entity, EntityId, EntityKind, Ontology
from ontomerge.formats import load_mapping, load_ontology

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def conf_a():
    return load_ontology(FIXTURES / "conf_a.onto")


@pytest.fixture
def conf_b():
    return load_ontology(FIXTURES / "conf_b.onto")


@pytest.fixture
def a_b_mapping():
    return load_mapping(FIXTURES / "a_b.map")


def make_ontology(name: str, classes=(), axioms=(), props=(), instances=()):
    """Small-ontology builder for hand-written test cases.

    classes/props/instances are IRI strings; axioms are (keyword, *iris)
    tuples using the statement keywords of the text format.
    """
    kind_map = {
        "SUBCLASS": AxiomKind.SUBCLASS_OF,
        "SUBPROP": AxiomKind.SUBPROPERTY_OF,
        "DOMAIN": AxiomKind.DOMAIN,
        "RANGE": AxiomKind.RANGE,
        "UNION": AxiomKind.UNION_OF,
        "TYPE": AxiomKind.INSTANCE_OF,
    }
    onto = Ontology(name=name)
    for iri in classes:
        onto.add_entity(Entity.declare(EntityId(iri), EntityKind.CLASS))
    for iri in props:
        onto.add_entity(Entity.declare(EntityId(iri), EntityKind.OBJECT_PROPERTY))
    for iri in instances:
        onto.add_entity(Entity.declare(EntityId(iri), EntityKind.INSTANCE))
    for keyword, *iris in axioms:
        onto.add_axiom(
            Axiom(
                kind=kind_map[keyword],
                subject=EntityId(iris[0]),
                objects=tuple(EntityId(i) for i in iris[1:]),
                provenance=name,
            )
        )
    return onto
