"""Line-oriented text formats for ontologies (.onto) and mappings (.map).

The .onto format has one statement per line:

    ONTOLOGY <name>           header, must come first
    CLASS <iri>               entity declarations
    OBJPROP <iri>
    DATAPROP <iri>
    INSTANCE <iri>
    LABEL <iri> "<text>"      extra label (repeatable for merged entities)
    SUBCLASS <sub> <super>    axioms
    SUBPROP <sub> <super>
    DOMAIN <prop> <class>
    RANGE <prop> <class>
    UNION <class> <m1> <m2> [...]
    TYPE <instance> <class>

Lines whose first non-blank character is '#' are comments. The .map format
is tab-separated `left<TAB>right<TAB>confidence` with an optional header
line `MAPPING <nameA> <nameB>`; confidence defaults to 1.0.

Serialization sorts declarations and axioms, so it is a pure, byte
deterministic function of the model, and parse(serialize(o)) reproduces o.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import Axiom, AxiomKind, Entity, EntityId, EntityKind, Ontology
from .errors import OntoParseError

_DECL_KEYWORDS = {
    "CLASS": EntityKind.CLASS,
    "OBJPROP": EntityKind.OBJECT_PROPERTY,
    "DATAPROP": EntityKind.DATA_PROPERTY,
    "INSTANCE": EntityKind.INSTANCE,
}

_AXIOM_KEYWORDS = {
    "SUBCLASS": AxiomKind.SUBCLASS_OF,
    "SUBPROP": AxiomKind.SUBPROPERTY_OF,
    "DOMAIN": AxiomKind.DOMAIN,
    "RANGE": AxiomKind.RANGE,
    "UNION": AxiomKind.UNION_OF,
    "TYPE": AxiomKind.INSTANCE_OF,
}

_LABEL_RE = re.compile(r'^LABEL\s+(\S+)\s+"((?:[^"\\]|\\.)*)"\s*$')


@dataclass(frozen=True)
class MappingPair:
    left: EntityId
    right: EntityId
    confidence: float = 1.0


@dataclass
class MappingFile:
    pairs: list[MappingPair] = field(default_factory=list)
    name_a: str | None = None
    name_b: str | None = None


def _unescape(text: str) -> str:
    return text.replace('\\"', '"').replace("\\\\", "\\")


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def parse_ontology(text: str) -> Ontology:
    """Parse the .onto format; raises OntoParseError with the offending line."""
    onto: Ontology | None = None
    explicit_labels: dict[EntityId, list[tuple[int, str]]] = {}
    pending_axioms: list[tuple[int, AxiomKind, list[EntityId]]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        keyword = parts[0]

        if onto is None:
            if keyword != "ONTOLOGY" or len(parts) != 2:
                raise OntoParseError(
                    "expected 'ONTOLOGY <name>' as the first statement", line_no
                )
            onto = Ontology(name=parts[1])
            continue

        if keyword == "ONTOLOGY":
            raise OntoParseError("duplicate ONTOLOGY header", line_no)

        if keyword in _DECL_KEYWORDS:
            if len(parts) != 2:
                raise OntoParseError(f"{keyword} takes exactly one IRI", line_no)
            try:
                onto.add_entity(Entity.declare(EntityId(parts[1]), _DECL_KEYWORDS[keyword]))
            except Exception as exc:
                raise OntoParseError(str(exc), line_no) from exc
            continue

        if keyword == "LABEL":
            match = _LABEL_RE.match(line)
            if not match:
                raise OntoParseError('expected LABEL <iri> "<text>"', line_no)
            eid = EntityId(match.group(1))
            explicit_labels.setdefault(eid, []).append(
                (line_no, _unescape(match.group(2)))
            )
            continue

        if keyword in _AXIOM_KEYWORDS:
            kind = _AXIOM_KEYWORDS[keyword]
            args = [EntityId(p) for p in parts[1:]]
            if kind is AxiomKind.UNION_OF:
                if len(args) < 3:
                    raise OntoParseError(
                        "UNION takes a class and at least two members", line_no
                    )
            elif len(args) != 2:
                raise OntoParseError(f"{keyword} takes exactly two IRIs", line_no)
            pending_axioms.append((line_no, kind, args))
            continue

        raise OntoParseError(f"unknown statement '{keyword}'", line_no)

    if onto is None:
        raise OntoParseError("empty input: missing ONTOLOGY header")

    for eid, labels in explicit_labels.items():
        entity = onto.entities.get(eid)
        if entity is None:
            raise OntoParseError(
                f"LABEL for undeclared entity {eid}", labels[0][0]
            )
        deduped: list[str] = []
        for _, lab in labels:
            if lab not in deduped:
                deduped.append(lab)
        onto.entities[eid] = entity.with_labels(deduped)

    for line_no, kind, args in pending_axioms:
        subject, objects = args[0], tuple(args[1:])
        try:
            _check_axiom_kinds(onto, kind, subject, objects)
            onto.add_axiom(
                Axiom(kind=kind, subject=subject, objects=objects, provenance=onto.name)
            )
        except OntoParseError as exc:
            if exc.line_no is None:
                raise OntoParseError(str(exc), line_no) from exc
            raise
        except Exception as exc:
            raise OntoParseError(str(exc), line_no) from exc

    return onto


def _check_axiom_kinds(
    onto: Ontology, kind: AxiomKind, subject: EntityId, objects: tuple[EntityId, ...]
) -> None:
    def kind_of(eid: EntityId) -> EntityKind:
        return onto.kind_of(eid)

    if kind is AxiomKind.SUBCLASS_OF:
        for eid in (subject, *objects):
            if kind_of(eid) is not EntityKind.CLASS:
                raise OntoParseError(f"SUBCLASS participant {eid} is not a class")
    elif kind is AxiomKind.SUBPROPERTY_OF:
        for eid in (subject, *objects):
            if not kind_of(eid).is_property:
                raise OntoParseError(f"SUBPROP participant {eid} is not a property")
    elif kind in (AxiomKind.DOMAIN, AxiomKind.RANGE):
        if not kind_of(subject).is_property:
            raise OntoParseError(f"{kind.value} subject {subject} is not a property")
        if kind_of(objects[0]) is not EntityKind.CLASS:
            raise OntoParseError(f"{kind.value} object {objects[0]} is not a class")
    elif kind is AxiomKind.UNION_OF:
        for eid in (subject, *objects):
            if kind_of(eid) is not EntityKind.CLASS:
                raise OntoParseError(f"UNION participant {eid} is not a class")
    elif kind is AxiomKind.INSTANCE_OF:
        if kind_of(subject) is not EntityKind.INSTANCE:
            raise OntoParseError(f"TYPE subject {subject} is not an instance")
        if kind_of(objects[0]) is not EntityKind.CLASS:
            raise OntoParseError(f"TYPE object {objects[0]} is not a class")


_KIND_DECL = {
    EntityKind.CLASS: "CLASS",
    EntityKind.OBJECT_PROPERTY: "OBJPROP",
    EntityKind.DATA_PROPERTY: "DATAPROP",
    EntityKind.INSTANCE: "INSTANCE",
}

_AXIOM_ORDER = [
    AxiomKind.SUBCLASS_OF,
    AxiomKind.SUBPROPERTY_OF,
    AxiomKind.DOMAIN,
    AxiomKind.RANGE,
    AxiomKind.UNION_OF,
    AxiomKind.INSTANCE_OF,
]

_AXIOM_STMT = {v: k for k, v in _AXIOM_KEYWORDS.items()}


def serialize_ontology(onto: Ontology) -> str:
    """Deterministic .onto text: sorted declarations, labels, then axioms."""
    lines = [f"ONTOLOGY {onto.name}"]
    for kind in (
        EntityKind.CLASS,
        EntityKind.OBJECT_PROPERTY,
        EntityKind.DATA_PROPERTY,
        EntityKind.INSTANCE,
    ):
        for eid in sorted(
            (e.id for e in onto.entities.values() if e.kind is kind)
        ):
            lines.append(f"{_KIND_DECL[kind]} {eid}")
    for eid in sorted(onto.entities):
        entity = onto.entities[eid]
        if entity.labels != (eid.local_name,):
            for label in entity.labels:
                lines.append(f'LABEL {eid} "{_escape(label)}"')
    for kind in _AXIOM_ORDER:
        axioms = sorted(
            (ax for ax in onto.axioms if ax.kind is kind),
            key=lambda ax: (ax.subject, ax.objects),
        )
        for ax in axioms:
            args = " ".join(str(e) for e in ax.participants)
            lines.append(f"{_AXIOM_STMT[kind]} {args}")
    return "\n".join(lines) + "\n"


def parse_mapping(text: str) -> MappingFile:
    """Parse the tab-separated .map format."""
    mapping = MappingFile()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("MAPPING"):
            parts = line.split()
            if len(parts) != 3:
                raise OntoParseError("expected 'MAPPING <nameA> <nameB>'", line_no)
            mapping.name_a, mapping.name_b = parts[1], parts[2]
            continue
        cells = line.split("\t")
        if len(cells) == 2:
            left, right, conf_text = cells[0], cells[1], "1.0"
        elif len(cells) == 3:
            left, right, conf_text = cells
        else:
            raise OntoParseError(
                "expected 'left<TAB>right[<TAB>confidence]'", line_no
            )
        left, right = left.strip(), right.strip()
        if not left or not right:
            raise OntoParseError("empty entity field", line_no)
        try:
            confidence = float(conf_text)
        except ValueError:
            raise OntoParseError(f"bad confidence '{conf_text}'", line_no) from None
        if not 0.0 <= confidence <= 1.0:
            raise OntoParseError(
                f"confidence {confidence} outside [0, 1]", line_no
            )
        mapping.pairs.append(
            MappingPair(EntityId(left), EntityId(right), confidence)
        )
    return mapping


def serialize_mapping(mapping: MappingFile) -> str:
    lines = []
    if mapping.name_a and mapping.name_b:
        lines.append(f"MAPPING {mapping.name_a} {mapping.name_b}")
    for pair in mapping.pairs:
        lines.append(f"{pair.left}\t{pair.right}\t{pair.confidence:g}")
    return "\n".join(lines) + "\n"


def load_ontology(path: str | Path) -> Ontology:
    return parse_ontology(Path(path).read_text(encoding="utf-8"))


def load_mapping(path: str | Path) -> MappingFile:
    return parse_mapping(Path(path).read_text(encoding="utf-8"))
