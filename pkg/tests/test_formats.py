import pytest

from ontomerge.core import AxiomKind, EntityId, EntityKind
from ontomerge.errors import OntoParseError
from ontomerge.formats import (
    parse_mapping,
    parse_ontology,
    serialize_mapping,
    serialize_ontology,
)
from ontomerge.generator import generate_dataset


def test_parse_minimal_file():
    onto = parse_ontology(
        "ONTOLOGY a\nCLASS a:Paper\nCLASS a:Document\nSUBCLASS a:Paper a:Document\n"
    )
    assert len(onto.entities) == 2
    assert len(onto.axioms) == 1
    ax = next(iter(onto.axioms))
    assert ax.kind is AxiomKind.SUBCLASS_OF
    assert ax.provenance == "a"


def test_parse_header_only():
    onto = parse_ontology("ONTOLOGY lonely\n")
    assert onto.name == "lonely"
    assert not onto.entities and not onto.axioms


def test_parse_comments_and_blank_lines():
    onto = parse_ontology("# leading comment\nONTOLOGY a\n\n# another\nCLASS a:X\n")
    assert EntityId("a:X") in onto.entities


def test_parse_errors_carry_line_numbers():
    with pytest.raises(OntoParseError) as err:
        parse_ontology("ONTOLOGY a\nCLASS a:X\nBOGUS a:X\n")
    assert "line 3" in str(err.value)


def test_parse_missing_header():
    with pytest.raises(OntoParseError):
        parse_ontology("CLASS a:X\n")


def test_parse_unknown_reference():
    with pytest.raises(OntoParseError):
        parse_ontology("ONTOLOGY a\nCLASS a:X\nSUBCLASS a:X a:Y\n")


def test_parse_duplicate_declaration():
    with pytest.raises(OntoParseError):
        parse_ontology("ONTOLOGY a\nCLASS a:X\nCLASS a:X\n")


def test_parse_kind_checks():
    with pytest.raises(OntoParseError):
        parse_ontology("ONTOLOGY a\nCLASS a:X\nOBJPROP a:p\nSUBCLASS a:p a:X\n")
    with pytest.raises(OntoParseError):
        parse_ontology("ONTOLOGY a\nCLASS a:X\nCLASS a:Y\nDOMAIN a:X a:Y\n")


def test_labels_replace_default_and_accumulate():
    onto = parse_ontology(
        'ONTOLOGY a\nCLASS a:X\nLABEL a:X "first"\nLABEL a:X "second"\n'
    )
    assert onto.entities[EntityId("a:X")].labels == ("first", "second")


def test_default_label_is_local_name():
    onto = parse_ontology("ONTOLOGY a\nCLASS a:Paper\n")
    assert onto.entities[EntityId("a:Paper")].labels == ("Paper",)


def test_fixture_counts(conf_a):
    # counts recorded when the fixture was authored
    assert len(conf_a.entities) == 12
    assert len(conf_a.axioms) == 11
    assert conf_a.count_by_kind(EntityKind.CLASS) == 7
    assert conf_a.count_by_kind(EntityKind.INSTANCE) == 2


def test_serialize_empty_is_header_only():
    from ontomerge.core import Ontology

    assert serialize_ontology(Ontology(name="x")) == "ONTOLOGY x\n"


def test_serialize_deterministic(conf_a):
    assert serialize_ontology(conf_a) == serialize_ontology(conf_a)


def test_roundtrip_fixture(conf_a):
    again = parse_ontology(serialize_ontology(conf_a))
    assert set(again.entities) == set(conf_a.entities)
    assert again.axioms == conf_a.axioms
    for eid, entity in conf_a.entities.items():
        assert again.entities[eid].kind is entity.kind
        assert again.entities[eid].labels == entity.labels


def test_roundtrip_label_escaping():
    text = 'ONTOLOGY a\nCLASS a:X\nLABEL a:X "with \\"quotes\\" and \\\\ slash"\n'
    onto = parse_ontology(text)
    assert onto.entities[EntityId("a:X")].labels == ('with "quotes" and \\ slash',)
    assert parse_ontology(serialize_ontology(onto)).entities[
        EntityId("a:X")
    ].labels == ('with "quotes" and \\ slash',)


@pytest.mark.parametrize("seed", range(12))
def test_roundtrip_generated(seed):
    ontologies, _, _ = generate_dataset(
        n=2, size=10 + seed, overlap=0.3, seed=seed, components=1 + seed % 3
    )
    for onto in ontologies:
        text = serialize_ontology(onto)
        again = parse_ontology(text)
        assert set(again.entities) == set(onto.entities)
        assert again.axioms == onto.axioms
        assert serialize_ontology(again) == text


def test_parse_mapping_single_line():
    mapping = parse_mapping("a:Paper\tb:Article\t1.0\n")
    assert len(mapping.pairs) == 1
    assert mapping.pairs[0].left == EntityId("a:Paper")
    assert mapping.pairs[0].confidence == 1.0


def test_parse_mapping_empty():
    assert parse_mapping("").pairs == []


def test_parse_mapping_default_confidence():
    mapping = parse_mapping("a:X\tb:Y\n")
    assert mapping.pairs[0].confidence == 1.0


def test_parse_mapping_fixture(a_b_mapping):
    assert len(a_b_mapping.pairs) == 7
    assert a_b_mapping.name_a == "conf_a"
    assert a_b_mapping.name_b == "conf_b"


def test_parse_mapping_bad_confidence():
    with pytest.raises(OntoParseError):
        parse_mapping("a:X\tb:Y\t1.5\n")
    with pytest.raises(OntoParseError):
        parse_mapping("a:X\tb:Y\tnope\n")


def test_parse_mapping_bad_shape():
    with pytest.raises(OntoParseError):
        parse_mapping("only-one-field\n")


def test_mapping_roundtrip(a_b_mapping):
    again = parse_mapping(serialize_mapping(a_b_mapping))
    assert again.pairs == a_b_mapping.pairs
    assert (again.name_a, again.name_b) == (a_b_mapping.name_a, a_b_mapping.name_b)
