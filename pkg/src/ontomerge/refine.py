"""Merge-requirement checks and repairs on a merge model.

Seven rules are implemented. R1, R2, and R3 re-insert lost class,
property, and instance images; R7 restores source subclass edges that no
longer have a path in the merged taxonomy; R15 folds multiple domains or
ranges of a property into a fresh union class; R16 breaks taxonomy
cycles; R19 reconnects classes that lost all taxonomic edges during the
merge although they were connected in their source.

`apply` runs the enabled rules in a fixed order (R16, R19, R15, then
R1/R2/R3/R7) and iterates to a fixpoint. Repairs that would re-create a
cycle just broken by R16 are skipped and reported as conflicts instead.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import networkx as nx

from .core import Axiom, AxiomKind, Entity, EntityId, EntityKind, Ontology
from .correspondence import CorrespondenceModel
from .errors import RefinementDidNotConverge
from .merge_model import MergeModel

ALL_RULES = ("R1", "R2", "R3", "R7", "R15", "R16", "R19")
REFINE_PROVENANCE = "refinement"
MAX_PASSES = 10
CYCLE_COUNT_CAP = 1000


class Scope(Enum):
    LOCAL = "local"
    GLOBAL = "global"


@dataclass(frozen=True)
class RefinementAction:
    rule: str
    scope: Scope
    description: str
    added_entities: tuple[Entity, ...] = ()
    added_axioms: tuple[Axiom, ...] = ()
    removed_axioms: tuple[Axiom, ...] = ()


@dataclass
class RefinementConfig:
    enabled_rules: frozenset = frozenset(ALL_RULES)
    apply_local: bool = True
    apply_global: bool = True

    def enabled(self, rule: str) -> bool:
        return rule in self.enabled_rules

    @classmethod
    def none(cls) -> "RefinementConfig":
        return cls(enabled_rules=frozenset(), apply_local=False, apply_global=False)


@dataclass
class RefineOutcome:
    actions: list[RefinementAction] = field(default_factory=list)
    conflicts: list[str] = field(default_factory=list)

    def extend(self, other: "RefineOutcome") -> None:
        self.actions.extend(other.actions)
        self.conflicts.extend(other.conflicts)


def resolve_image(mapping: dict[EntityId, EntityId], eid: EntityId) -> EntityId:
    """Follow integration chains to the final image of a source entity."""
    seen = {eid}
    while eid in mapping:
        eid = mapping[eid]
        if eid in seen:
            break
        seen.add(eid)
    return eid


def _subclass_axioms(model: MergeModel) -> list[Axiom]:
    return [ax for ax in model.axioms if ax.kind is AxiomKind.SUBCLASS_OF]


def _directed_adjacency(model: MergeModel) -> dict[EntityId, set[EntityId]]:
    adj: dict[EntityId, set[EntityId]] = {}
    for ax in _subclass_axioms(model):
        adj.setdefault(ax.subject, set()).add(ax.objects[0])
    return adj


def _has_path(
    adj: dict[EntityId, set[EntityId]], src: EntityId, dst: EntityId
) -> bool:
    if src == dst:
        return True
    seen = {src}
    queue = deque([src])
    while queue:
        node = queue.popleft()
        for nxt in adj.get(node, ()):
            if nxt == dst:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


# ---------------------------------------------------------------------------
# metrics (also used by the report module)
# ---------------------------------------------------------------------------


def count_oneness_violations(model: MergeModel) -> int:
    """Properties carrying more than one domain or more than one range."""
    domains: dict[EntityId, int] = {}
    ranges: dict[EntityId, int] = {}
    for ax in model.axioms:
        if ax.kind is AxiomKind.DOMAIN:
            domains[ax.subject] = domains.get(ax.subject, 0) + 1
        elif ax.kind is AxiomKind.RANGE:
            ranges[ax.subject] = ranges.get(ax.subject, 0) + 1
    bad = {p for p, n in domains.items() if n > 1}
    bad |= {p for p, n in ranges.items() if n > 1}
    return len(bad)


def count_taxonomy_cycles(
    model: MergeModel, cap: int = CYCLE_COUNT_CAP
) -> tuple[int, bool]:
    """Number of elementary cycles in the subclass digraph, capped.

    Returns (count, capped). Cycle enumeration runs per strongly connected
    component, so acyclic regions cost nothing.
    """
    graph = nx.DiGraph()
    for ax in _subclass_axioms(model):
        graph.add_edge(ax.subject, ax.objects[0])
    total = 0
    for scc in nx.strongly_connected_components(graph):
        if len(scc) == 1:
            node = next(iter(scc))
            if not graph.has_edge(node, node):
                continue
        sub = graph.subgraph(scc)
        for _ in nx.simple_cycles(sub):
            total += 1
            if total >= cap:
                return cap, True
    return total, False


def _preimages(model: MergeModel) -> dict[EntityId, list[EntityId]]:
    reverse: dict[EntityId, list[EntityId]] = {}
    for source, merged in model.integrated_of.items():
        reverse.setdefault(resolve_image(model.integrated_of, source), []).append(source)
    for targets in reverse.values():
        targets.sort()
    return reverse


def _source_taxo_connected(sources: tuple[Ontology, ...]) -> set[EntityId]:
    connected: set[EntityId] = set()
    for onto in sources:
        for ax in onto.axioms:
            if ax.kind is AxiomKind.SUBCLASS_OF:
                connected.add(ax.subject)
                connected.add(ax.objects[0])
    return connected


def find_unconnected_classes(model: MergeModel) -> list[EntityId]:
    """Classes with no taxonomic edge now that had one in some source."""
    adj: set[EntityId] = set()
    for ax in _subclass_axioms(model):
        adj.add(ax.subject)
        adj.add(ax.objects[0])
    source_connected = _source_taxo_connected(model.source_ontologies)
    preimages = _preimages(model)
    result = []
    for eid in sorted(model.entities):
        if model.entities[eid].kind is not EntityKind.CLASS or eid in adj:
            continue
        pre = preimages.get(eid, [eid])
        if any(p in source_connected for p in pre):
            result.append(eid)
    return result


@dataclass
class PreservationReport:
    class_cov: float
    prop_cov: float
    inst_cov: float
    unpreserved_structures: int


def check_preservation(
    model: MergeModel,
    sources: tuple[Ontology, ...] | None = None,
    corr: CorrespondenceModel | None = None,
) -> PreservationReport:
    """Entity coverage ratios plus the count of broken source subclass edges.

    A source subclass edge (c, c') is preserved when the image of c
    reaches the image of c' through directed subclass edges in the model;
    edges whose two ends merged into one entity are trivially preserved.
    """
    sources = sources if sources is not None else model.source_ontologies
    image = model.integrated_of
    covered = {EntityKind.CLASS: [0, 0], EntityKind.INSTANCE: [0, 0]}
    prop_counts = [0, 0]
    seen: set[EntityId] = set()
    for onto in sources:
        for eid, ent in onto.entities.items():
            if eid in seen:
                continue
            seen.add(eid)
            bucket = prop_counts if ent.kind.is_property else covered[ent.kind]
            bucket[1] += 1
            if resolve_image(image, eid) in model.entities:
                bucket[0] += 1

    adj = _directed_adjacency(model)
    unpreserved = 0
    for onto in sources:
        for ax in onto.axioms:
            if ax.kind is not AxiomKind.SUBCLASS_OF:
                continue
            src = resolve_image(image, ax.subject)
            dst = resolve_image(image, ax.objects[0])
            if src == dst:
                continue
            if src not in model.entities or dst not in model.entities:
                unpreserved += 1
            elif not _has_path(adj, src, dst):
                unpreserved += 1

    def ratio(pair: list[int]) -> float:
        return pair[0] / pair[1] if pair[1] else 1.0

    return PreservationReport(
        class_cov=ratio(covered[EntityKind.CLASS]),
        prop_cov=ratio(prop_counts),
        inst_cov=ratio(covered[EntityKind.INSTANCE]),
        unpreserved_structures=unpreserved,
    )


# ---------------------------------------------------------------------------
# repairs
# ---------------------------------------------------------------------------

_ENTITY_RULE = {
    EntityKind.CLASS: "R1",
    EntityKind.OBJECT_PROPERTY: "R2",
    EntityKind.DATA_PROPERTY: "R2",
    EntityKind.INSTANCE: "R3",
}


def repair_preservation(
    model: MergeModel,
    sources: tuple[Ontology, ...] | None = None,
    corr: CorrespondenceModel | None = None,
    scope: Scope = Scope.GLOBAL,
    enabled_rules: frozenset = frozenset(ALL_RULES),
) -> RefineOutcome:
    """R1-R3 plus R7: restore lost entity images and broken subclass paths.

    At local scope only structure is repaired, and only for source edges
    whose two endpoint images already live in the target; entity
    re-insertion is meaningful on the full model alone.
    """
    sources = sources if sources is not None else model.source_ontologies
    outcome = RefineOutcome()
    image = model.integrated_of

    if scope is Scope.GLOBAL:
        preimages = _preimages(model)
        missing: dict[EntityId, Entity] = {}
        for onto in sources:
            for eid, ent in onto.entities.items():
                target = resolve_image(image, eid)
                if target in model.entities or target in missing:
                    continue
                if _ENTITY_RULE[ent.kind] not in enabled_rules:
                    continue
                if target == eid:
                    missing[target] = ent
                else:
                    labels: list[str] = []
                    for member in preimages.get(target, [eid]):
                        for src_onto in sources:
                            member_ent = src_onto.entities.get(member)
                            if member_ent:
                                for lab in member_ent.labels:
                                    if lab not in labels:
                                        labels.append(lab)
                                break
                    missing[target] = Entity(
                        id=target, kind=ent.kind, labels=tuple(labels) or (target.local_name,)
                    )
        for target in sorted(missing):
            ent = missing[target]
            model.entities[target] = ent
            outcome.actions.append(
                RefinementAction(
                    rule=_ENTITY_RULE[ent.kind],
                    scope=scope,
                    description=f"re-inserted lost {ent.kind.value} {target}",
                    added_entities=(ent,),
                )
            )

    if "R7" not in enabled_rules:
        return outcome

    adj = _directed_adjacency(model)
    wanted: list[tuple[EntityId, EntityId, str]] = []
    seen_edges: set[tuple[EntityId, EntityId]] = set()
    for onto in sources:
        for ax in onto.axioms:
            if ax.kind is not AxiomKind.SUBCLASS_OF:
                continue
            src = resolve_image(image, ax.subject)
            dst = resolve_image(image, ax.objects[0])
            if src == dst or (src, dst) in seen_edges:
                continue
            if src not in model.entities or dst not in model.entities:
                continue  # local view, or entity rules disabled
            seen_edges.add((src, dst))
            wanted.append((src, dst, onto.name))

    for src, dst, origin in sorted(wanted, key=lambda t: (t[0], t[1])):
        if _has_path(adj, src, dst):
            continue
        if _has_path(adj, dst, src):
            outcome.conflicts.append(
                f"R7: restoring {src} -> {dst} would re-create a cycle; skipped"
            )
            continue
        axiom = Axiom(
            kind=AxiomKind.SUBCLASS_OF,
            subject=src,
            objects=(dst,),
            provenance=origin,
            translated=True,
        )
        model.axioms.add(axiom)
        adj.setdefault(src, set()).add(dst)
        outcome.actions.append(
            RefinementAction(
                rule="R7",
                scope=scope,
                description=f"restored subclass path {src} -> {dst}",
                added_axioms=(axiom,),
            )
        )
    return outcome


def _fresh_union_id(model: MergeModel, prop: EntityId, suffix: str) -> EntityId:
    base = f"union:{prop.iri}:{suffix}"
    candidate = EntityId(base)
    n = 2
    while candidate in model.entities:
        candidate = EntityId(f"{base}:{n}")
        n += 1
    return candidate


def repair_oneness(model: MergeModel, scope: Scope = Scope.GLOBAL) -> RefineOutcome:
    """R15: replace multiple domains (or ranges) with one fresh union class."""
    outcome = RefineOutcome()
    for axiom_kind, suffix in ((AxiomKind.DOMAIN, "dom"), (AxiomKind.RANGE, "rng")):
        by_prop: dict[EntityId, list[Axiom]] = {}
        for ax in model.axioms:
            if ax.kind is axiom_kind:
                by_prop.setdefault(ax.subject, []).append(ax)
        for prop in sorted(by_prop):
            axioms = by_prop[prop]
            if len(axioms) < 2:
                continue
            union_id = _fresh_union_id(model, prop, suffix)
            union_entity = Entity.declare(union_id, EntityKind.CLASS)
            members = tuple(sorted({ax.objects[0] for ax in axioms}))
            union_axiom = Axiom(
                kind=AxiomKind.UNION_OF,
                subject=union_id,
                objects=members,
                provenance=REFINE_PROVENANCE,
            )
            replacement = Axiom(
                kind=axiom_kind,
                subject=prop,
                objects=(union_id,),
                provenance=REFINE_PROVENANCE,
            )
            for ax in axioms:
                model.axioms.discard(ax)
            model.entities[union_id] = union_entity
            model.axioms.add(union_axiom)
            model.axioms.add(replacement)
            outcome.actions.append(
                RefinementAction(
                    rule="R15",
                    scope=scope,
                    description=(
                        f"folded {len(axioms)} {suffix} declarations of {prop} "
                        f"into {union_id}"
                    ),
                    added_entities=(union_entity,),
                    added_axioms=(union_axiom, replacement),
                    removed_axioms=tuple(sorted(axioms, key=lambda a: a.objects)),
                )
            )
    return outcome


def repair_acyclicity(model: MergeModel, scope: Scope = Scope.GLOBAL) -> RefineOutcome:
    """R16: delete one edge per cyclic component until the taxonomy is acyclic.

    Translated edges are removed first; among equals the lexicographically
    greatest (subject, object) pair goes.
    """
    outcome = RefineOutcome()
    while True:
        graph = nx.DiGraph()
        edge_axiom: dict[tuple[EntityId, EntityId], Axiom] = {}
        for ax in _subclass_axioms(model):
            graph.add_edge(ax.subject, ax.objects[0])
            edge_axiom[(ax.subject, ax.objects[0])] = ax
        cyclic = [scc for scc in nx.strongly_connected_components(graph) if len(scc) > 1]
        if not cyclic:
            break
        for scc in sorted(cyclic, key=lambda s: min(s)):
            internal = [
                ax
                for (u, v), ax in edge_axiom.items()
                if u in scc and v in scc
            ]
            preferred = [ax for ax in internal if ax.translated] or internal
            victim = max(preferred, key=lambda ax: (ax.subject, ax.objects[0]))
            model.axioms.discard(victim)
            outcome.actions.append(
                RefinementAction(
                    rule="R16",
                    scope=scope,
                    description=(
                        f"removed subclass edge {victim.subject} -> "
                        f"{victim.objects[0]} to break a cycle"
                    ),
                    removed_axioms=(victim,),
                )
            )
    return outcome


def repair_connectivity(
    model: MergeModel,
    sources: tuple[Ontology, ...] | None = None,
    corr: CorrespondenceModel | None = None,
    scope: Scope = Scope.GLOBAL,
) -> RefineOutcome:
    """R19: re-attach classes that lost every taxonomic edge in the merge.

    Re-translation picks the smallest candidate source edge that neither
    loops nor creates a cycle. If no candidate qualifies, the class is
    left alone and reported.
    """
    sources = sources if sources is not None else model.source_ontologies
    outcome = RefineOutcome()
    image = model.integrated_of
    preimages = _preimages(model)
    adj = _directed_adjacency(model)

    for eid in find_unconnected_classes(model):
        pre = preimages.get(eid, [eid])
        candidates: list[tuple[EntityId, EntityId, str]] = []
        for onto in sources:
            for ax in onto.axioms:
                if ax.kind is not AxiomKind.SUBCLASS_OF:
                    continue
                if ax.subject not in pre and ax.objects[0] not in pre:
                    continue
                src = resolve_image(image, ax.subject)
                dst = resolve_image(image, ax.objects[0])
                if src == dst:
                    continue
                if src not in model.entities or dst not in model.entities:
                    continue
                candidates.append((src, dst, onto.name))
        added = False
        for src, dst, origin in sorted(set(candidates), key=lambda t: (t[0], t[1])):
            if _has_path(adj, dst, src):
                continue  # would close a cycle
            axiom = Axiom(
                kind=AxiomKind.SUBCLASS_OF,
                subject=src,
                objects=(dst,),
                provenance=origin,
                translated=True,
            )
            model.axioms.add(axiom)
            adj.setdefault(src, set()).add(dst)
            outcome.actions.append(
                RefinementAction(
                    rule="R19",
                    scope=scope,
                    description=f"reconnected {eid} via {src} -> {dst}",
                    added_axioms=(axiom,),
                )
            )
            added = True
            break
        if not added and candidates:
            outcome.conflicts.append(
                f"R19: every re-translated edge for {eid} would create a cycle; "
                "left unconnected"
            )
    return outcome


def apply(
    config: RefinementConfig,
    scope: Scope,
    model: MergeModel,
    sources: tuple[Ontology, ...] | None = None,
    corr: CorrespondenceModel | None = None,
    max_passes: int = MAX_PASSES,
) -> RefineOutcome:
    """Run the enabled rules to a fixpoint, mutating the model in place.

    Rule order within a pass repairs structure-destroying issues first:
    R16, then R19, R15, and the preservation rules. A pass without
    actions means convergence; exceeding the pass budget raises.
    """
    if scope is Scope.LOCAL and not config.apply_local:
        return RefineOutcome()
    if scope is Scope.GLOBAL and not config.apply_global:
        return RefineOutcome()

    total = RefineOutcome()
    last_active: set[str] = set()
    for _ in range(max_passes):
        this_pass = RefineOutcome()
        if config.enabled("R16"):
            this_pass.extend(repair_acyclicity(model, scope))
        if config.enabled("R19"):
            this_pass.extend(repair_connectivity(model, sources, corr, scope))
        if config.enabled("R15"):
            this_pass.extend(repair_oneness(model, scope))
        preservation_rules = config.enabled_rules & {"R1", "R2", "R3", "R7"}
        if preservation_rules:
            this_pass.extend(
                repair_preservation(
                    model, sources, corr, scope, enabled_rules=config.enabled_rules
                )
            )
        total.conflicts = this_pass.conflicts  # keep only the settled state
        if not this_pass.actions:
            return total
        total.actions.extend(this_pass.actions)
        last_active = {action.rule for action in this_pass.actions}
    raise RefinementDidNotConverge(tuple(sorted(last_active)), max_passes)
