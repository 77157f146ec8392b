"""Deterministic synthetic datasets for experiments and tests.

`generate_dataset` builds n ontologies with tree taxonomies, properties,
instances, and union axioms, plus a perfect mapping covering a requested
share of the classes and a noisy imperfect variant of it. Everything is
driven by one seeded RNG, so equal parameters give byte-identical files.

The `fig1` preset is a hand-built five-ontology topology with six
correspondence groups. Its shape is calibrated so that the one-step n-ary
merge costs 6 combinations, 28 reconstructions, and 1 output while the
pairwise ladder over the same inputs costs 10, 32, and 4.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Sequence

from .core import Axiom, AxiomKind, Entity, EntityId, EntityKind, Ontology
from .errors import MergeToolError
from .formats import MappingFile, MappingPair, serialize_mapping, serialize_ontology


def _add_class(onto: Ontology, iri: str, labels: tuple[str, ...] | None = None) -> EntityId:
    eid = EntityId(iri)
    entity = Entity.declare(eid, EntityKind.CLASS)
    if labels:
        entity = entity.with_labels(labels)
    onto.add_entity(entity)
    return eid


def _subclass(onto: Ontology, sub: EntityId, sup: EntityId) -> None:
    onto.axioms.add(
        Axiom(
            kind=AxiomKind.SUBCLASS_OF,
            subject=sub,
            objects=(sup,),
            provenance=onto.name,
        )
    )


def generate_ontology(
    name: str,
    size: int,
    rng: random.Random,
    *,
    components: int = 1,
    with_props: bool = True,
    with_instances: bool = True,
    with_unions: bool = True,
) -> Ontology:
    """One ontology: a forest of `components` trees plus property machinery.

    Class j belongs to tree (j mod components) and gets a parent from its
    own tree, so the taxonomy falls into that many pieces. Domains, ranges,
    and unions pick classes freely across trees, which is what later feeds
    the distributed-axiom machinery. A handful of extra classes stay
    completely isolated.
    """
    onto = Ontology(name=name)
    components = max(1, min(components, size))
    classes = []
    for j in range(size):
        labels = None
        if rng.random() < 0.3:
            labels = (f"{name} concept {j}",)
        classes.append(_add_class(onto, f"{name}:C{j}", labels))
    for j in range(components, size):
        same_tree = [l for l in range(j) if l % components == j % components]
        _subclass(onto, classes[j], classes[rng.choice(same_tree)])
    for x in range(size // 10):
        _add_class(onto, f"{name}:X{x}")  # isolated on purpose

    if with_props and size >= 2:
        for i in range(max(1, size // 6)):
            prop = EntityId(f"{name}:p{i}")
            onto.add_entity(Entity.declare(prop, EntityKind.OBJECT_PROPERTY))
            onto.add_axiom(
                Axiom(AxiomKind.DOMAIN, prop, (classes[rng.randrange(size)],), provenance=name)
            )
            onto.add_axiom(
                Axiom(AxiomKind.RANGE, prop, (classes[rng.randrange(size)],), provenance=name)
            )
        for i in range(max(1, size // 8)):
            prop = EntityId(f"{name}:d{i}")
            onto.add_entity(Entity.declare(prop, EntityKind.DATA_PROPERTY))
            onto.add_axiom(
                Axiom(
                    AxiomKind.DOMAIN,
                    prop,
                    (classes[rng.randrange(size)],),
                    provenance=name,
                )
            )

    if with_instances:
        for k in range(size // 5):
            inst = EntityId(f"{name}:i{k}")
            onto.add_entity(Entity.declare(inst, EntityKind.INSTANCE))
            onto.add_axiom(
                Axiom(
                    AxiomKind.INSTANCE_OF,
                    inst,
                    (classes[rng.randrange(size)],),
                    provenance=name,
                )
            )

    if with_unions and size >= 4:
        for _ in range(size // 10):
            subject, m1, m2 = rng.sample(classes, 3)
            onto.axioms.add(
                Axiom(AxiomKind.UNION_OF, subject, (m1, m2), provenance=name)
            )
    return onto


def generate_dataset(
    n: int,
    size: int,
    overlap: float,
    seed: int,
    *,
    components: int = 1,
    dirty: bool = False,
    with_props: bool = True,
    with_instances: bool = True,
    with_unions: bool = True,
) -> tuple[list[Ontology], list[MappingFile], list[MappingFile]]:
    """n ontologies plus perfect and imperfect mappings.

    Each ontology is a forest of `components` trees; classes correspond
    tree-wise across ontologies, so the merged taxonomy keeps roughly that
    many blocks while unions, domains, and ranges cross block borders.
    With `dirty` set, some mapped concepts get reversed subclass edges
    across ontologies (cycle fodder).
    """
    if n < 1:
        raise MergeToolError("need n >= 1")
    if not 0.0 <= overlap <= 1.0:
        raise MergeToolError("overlap must be within [0, 1]")
    rng = random.Random(seed)
    components = max(1, min(components, size))
    ontologies = [
        generate_ontology(
            f"o{i + 1}",
            size,
            rng,
            components=components,
            with_props=with_props,
            with_instances=with_instances,
            with_unions=with_unions,
        )
        for i in range(n)
    ]

    perfect_pairs: list[MappingPair] = []
    shared_count = int(round(overlap * size))
    shared = sorted(rng.sample(range(size), shared_count)) if shared_count else []
    for j in shared:
        count = rng.randint(2, n) if n > 2 else 2
        participants = sorted(rng.sample(range(n), count))
        for a, b in zip(participants, participants[1:]):
            perfect_pairs.append(
                MappingPair(
                    EntityId(f"{ontologies[a].name}:C{j}"),
                    EntityId(f"{ontologies[b].name}:C{j}"),
                    1.0,
                )
            )
        if dirty and rng.random() < 0.4:
            first = ontologies[participants[0]]
            second = ontologies[participants[1]]
            same_tree = [
                l for l in range(size) if l % components == j % components and l != j
            ]
            if same_tree:
                other = rng.choice(same_tree)
                _subclass(
                    first, EntityId(f"{first.name}:C{j}"), EntityId(f"{first.name}:C{other}")
                )
                _subclass(
                    second, EntityId(f"{second.name}:C{other}"), EntityId(f"{second.name}:C{j}")
                )
                perfect_pairs.append(
                    MappingPair(
                        EntityId(f"{first.name}:C{other}"),
                        EntityId(f"{second.name}:C{other}"),
                        1.0,
                    )
                )
    if with_props and size >= 2 and n >= 2:
        for i in range(max(1, size // 6)):
            if rng.random() < overlap:
                count = rng.randint(2, n) if n > 2 else 2
                participants = sorted(rng.sample(range(n), count))
                for a, b in zip(participants, participants[1:]):
                    perfect_pairs.append(
                        MappingPair(
                            EntityId(f"{ontologies[a].name}:p{i}"),
                            EntityId(f"{ontologies[b].name}:p{i}"),
                            1.0,
                        )
                    )

    imperfect_pairs: list[MappingPair] = []
    for pair in perfect_pairs:
        if rng.random() < 0.25:
            continue
        imperfect_pairs.append(
            MappingPair(pair.left, pair.right, round(rng.uniform(0.5, 1.0), 2))
        )
    if n >= 2:
        for _ in range(max(1, shared_count // 4)):
            a, b = rng.sample(range(n), 2)
            j, l = rng.randrange(size), rng.randrange(size)
            imperfect_pairs.append(
                MappingPair(
                    EntityId(f"{ontologies[a].name}:C{j}"),
                    EntityId(f"{ontologies[b].name}:C{l}"),
                    round(rng.uniform(0.5, 0.9), 2),
                )
            )

    perfect = [MappingFile(pairs=perfect_pairs)]
    imperfect = [MappingFile(pairs=imperfect_pairs)]
    return ontologies, perfect, imperfect


def fig1_dataset() -> tuple[list[Ontology], list[MappingFile]]:
    """Five ontologies with six correspondence groups; see module docstring."""
    o1 = Ontology(name="o1")
    for iri in ("o1:A", "o1:A2", "o1:A3", "o1:FA1", "o1:B", "o1:FB1", "o1:FB2", "o1:E"):
        _add_class(o1, iri)
    for sub, sup in (
        ("o1:A", "o1:A2"),
        ("o1:A2", "o1:A3"),
        ("o1:A", "o1:A3"),
        ("o1:FA1", "o1:A"),
        ("o1:FB1", "o1:B"),
        ("o1:FB2", "o1:B"),
    ):
        _subclass(o1, EntityId(sub), EntityId(sup))

    o2 = Ontology(name="o2")
    for iri in ("o2:A", "o2:FA2", "o2:C", "o2:FC1", "o2:FC2", "o2:FC3", "o2:F"):
        _add_class(o2, iri)
    for sub, sup in (
        ("o2:FA2", "o2:A"),
        ("o2:FC1", "o2:C"),
        ("o2:FC2", "o2:C"),
        ("o2:FC3", "o2:C"),
    ):
        _subclass(o2, EntityId(sub), EntityId(sup))

    o3 = Ontology(name="o3")
    for iri in ("o3:B", "o3:FB", "o3:C", "o3:FC", "o3:D", "o3:FD"):
        _add_class(o3, iri)
    for sub, sup in (
        ("o3:FB", "o3:B"),
        ("o3:FC", "o3:C"),
        ("o3:B", "o3:C"),
        ("o3:FD", "o3:D"),
    ):
        _subclass(o3, EntityId(sub), EntityId(sup))

    o4 = Ontology(name="o4")
    for iri in ("o4:A", "o4:FA3", "o4:FA4", "o4:D", "o4:E", "o4:F"):
        _add_class(o4, iri)
    for sub, sup in (
        ("o4:E", "o4:F"),
        ("o4:FA3", "o4:A"),
        ("o4:FA4", "o4:A"),
    ):
        _subclass(o4, EntityId(sub), EntityId(sup))

    o5 = Ontology(name="o5")
    for iri in (
        "o5:D",
        "o5:E",
        "o5:F",
        "o5:Root",
        "o5:FD1",
        "o5:FD2",
        "o5:FD3",
        "o5:FE1",
        "o5:FE2",
        "o5:FE3",
        "o5:FF1",
        "o5:FF2",
        "o5:FF3",
    ):
        _add_class(o5, iri)
    for sub, sup in (
        ("o5:FD1", "o5:D"),
        ("o5:FD2", "o5:D"),
        ("o5:FD3", "o5:D"),
        ("o5:FE1", "o5:E"),
        ("o5:FE2", "o5:E"),
        ("o5:FE3", "o5:E"),
        ("o5:FF1", "o5:F"),
        ("o5:FF2", "o5:F"),
        ("o5:FF3", "o5:F"),
        ("o5:D", "o5:Root"),
        ("o5:E", "o5:Root"),
    ):
        _subclass(o5, EntityId(sub), EntityId(sup))

    pairs = [
        ("o1:A", "o1:A2"),
        ("o1:A2", "o1:A3"),
        ("o1:A", "o2:A"),
        ("o2:A", "o4:A"),
        ("o1:B", "o3:B"),
        ("o2:C", "o3:C"),
        ("o3:D", "o4:D"),
        ("o4:D", "o5:D"),
        ("o1:E", "o4:E"),
        ("o4:E", "o5:E"),
        ("o2:F", "o4:F"),
        ("o4:F", "o5:F"),
    ]
    mapping = MappingFile(
        pairs=[MappingPair(EntityId(a), EntityId(b), 1.0) for a, b in pairs]
    )
    return [o1, o2, o3, o4, o5], [mapping]


PRESETS = {"fig1": fig1_dataset}


def write_dataset(
    out_dir: str | Path,
    ontologies: Sequence[Ontology],
    perfect: Sequence[MappingFile],
    imperfect: Sequence[MappingFile] | None = None,
) -> list[Path]:
    """Write .onto and .map files; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for onto in ontologies:
        path = out / f"{onto.name}.onto"
        path.write_text(serialize_ontology(onto), encoding="utf-8")
        written.append(path)
    for label, mappings in (("perfect", perfect), ("imperfect", imperfect or [])):
        if not mappings:
            continue
        text = "".join(serialize_mapping(m) for m in mappings)
        path = out / f"{label}.map"
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
