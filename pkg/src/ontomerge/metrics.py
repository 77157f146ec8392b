"""Quality metrics and report rendering for completed merge runs.

Each run yields one report: operation counters, partition shape, coverage
ratios, the merge-requirement statistics (oneness, unconnected classes,
cycles, unpreserved structures), and a redundancy check. Reports render
as a flat key-value text block and as one CSV row; both renderings are
byte deterministic apart from wall-clock fields.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from itertools import combinations

from .core import EntityKind
from .merge_model import MergeModel
from .partition import overlap_ratio
from .refine import (
    check_preservation,
    count_oneness_violations,
    count_taxonomy_cycles,
    find_unconnected_classes,
)
from .strategies import OpCounters, RunResult

CSV_COLUMNS = [
    "dataset",
    "variant",
    "strategy",
    "k",
    "combine",
    "reconst",
    "output",
    "cor",
    "tr",
    "ds_pct",
    "tr_pct",
    "ov_pct",
    "max_card",
    "class_cov",
    "prop_cov",
    "inst_cov",
    "str",
    "on",
    "c_u",
    "cyc",
    "r_local",
    "r_global",
    "merges",
    "wall_ms",
]

_FLOAT_FIELDS = {"ds_pct", "tr_pct", "ov_pct", "class_cov", "prop_cov", "inst_cov"}


@dataclass
class MergeReport:
    dataset: str
    variant: str
    strategy: str
    counters: OpCounters
    k: int
    ds_pct: float
    tr_pct: float
    ov_pct: float
    max_card: int
    class_count: int
    prop_count: int
    inst_count: int
    class_cov: float
    prop_cov: float
    inst_cov: float
    str_count: int
    on_count: int
    c_u: int
    cyc: int
    cyc_capped: bool = False
    redundancy: int = 0
    conflicts: list[str] = field(default_factory=list)

    def row(self) -> dict[str, object]:
        c = self.counters
        return {
            "dataset": self.dataset,
            "variant": self.variant,
            "strategy": self.strategy,
            "k": self.k,
            "combine": c.combine,
            "reconst": c.reconst,
            "output": c.output,
            "cor": c.cor,
            "tr": c.tr,
            "ds_pct": self.ds_pct,
            "tr_pct": self.tr_pct,
            "ov_pct": self.ov_pct,
            "max_card": self.max_card,
            "class_cov": self.class_cov,
            "prop_cov": self.prop_cov,
            "inst_cov": self.inst_cov,
            "str": self.str_count,
            "on": self.on_count,
            "c_u": self.c_u,
            "cyc": self.cyc,
            "r_local": c.r_local,
            "r_global": c.r_global,
            "merges": c.merges,
            "wall_ms": int(round(c.wall_ms)),
        }


def count_redundant_entities(model: MergeModel) -> int:
    """Pairs of entities with equal kind, label set, and axiom neighborhood."""
    neighborhood: dict = {}
    for ax in model.axioms:
        for eid in set(ax.participants):
            role = "s" if eid == ax.subject else "o"
            others = tuple(sorted(str(p) for p in ax.participants if p != eid))
            neighborhood.setdefault(eid, set()).add((ax.kind.value, role, others))
    groups: dict = {}
    for eid, entity in model.entities.items():
        key = (
            entity.kind,
            frozenset(entity.labels),
            frozenset(neighborhood.get(eid, ())),
        )
        groups.setdefault(key, []).append(eid)
    return sum(
        len(list(combinations(members, 2)))
        for members in groups.values()
        if len(members) > 1
    )


def compute_report(result: RunResult, dataset: str, variant: str = "") -> MergeReport:
    """All metrics for one finished run, derived from its final model."""
    model = result.model
    total_axioms = len(model.axioms)
    preservation = check_preservation(model, model.source_ontologies, result.corr)
    cyc, capped = count_taxonomy_cycles(model)
    translated = sum(1 for ax in model.axioms if ax.translated)
    return MergeReport(
        dataset=dataset,
        variant=variant or (result.config.variant_id or ""),
        strategy=result.config.strategy.value,
        counters=result.counters,
        k=result.partition.k,
        ds_pct=100.0 * result.distributed.taxonomic_count() / total_axioms
        if total_axioms
        else 0.0,
        tr_pct=100.0 * translated / total_axioms if total_axioms else 0.0,
        ov_pct=100.0 * overlap_ratio(result.corr, model),
        max_card=result.corr.max_card(),
        class_count=sum(
            1 for e in model.entities.values() if e.kind is EntityKind.CLASS
        ),
        prop_count=sum(1 for e in model.entities.values() if e.kind.is_property),
        inst_count=sum(
            1 for e in model.entities.values() if e.kind is EntityKind.INSTANCE
        ),
        class_cov=preservation.class_cov,
        prop_cov=preservation.prop_cov,
        inst_cov=preservation.inst_cov,
        str_count=preservation.unpreserved_structures,
        on_count=count_oneness_violations(model),
        c_u=len(find_unconnected_classes(model)),
        cyc=cyc,
        cyc_capped=capped,
        redundancy=count_redundant_entities(model),
        conflicts=list(result.conflicts),
    )


def _variant_key(variant: str):
    match = re.fullmatch(r"V(\d+)", variant)
    return (0, int(match.group(1))) if match else (1, variant)


def sort_reports(reports: list[MergeReport]) -> list[MergeReport]:
    return sorted(
        reports, key=lambda r: (r.dataset, _variant_key(r.variant), r.strategy)
    )


def _format_value(column: str, value: object) -> str:
    if column in _FLOAT_FIELDS:
        return f"{value:.4f}"
    return str(value)


def render_csv(reports: list[MergeReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in sort_reports(reports):
        row = report.row()
        writer.writerow([_format_value(col, row[col]) for col in CSV_COLUMNS])
    return buffer.getvalue()


def render_text(
    reports: list[MergeReport], errors: list[tuple[str, str, str]] | None = None
) -> str:
    """Flat key-value block per run, plus compactness and diagnostics."""
    blocks = []
    for report in sort_reports(reports):
        lines = []
        row = report.row()
        for column in CSV_COLUMNS:
            value = _format_value(column, row[column])
            note = ""
            if column in ("class_cov", "prop_cov", "inst_cov") and row[column] > 1.0:
                note = "  # above 1: union classes added"
            lines.append(f"{column}: {value}{note}")
        lines.append(
            f"compactness: {report.class_count} classes, "
            f"{report.prop_count} properties, {report.inst_count} instances"
        )
        lines.append(f"redundancy: {report.redundancy}")
        if report.cyc_capped:
            lines.append("note: cycle count hit the enumeration cap")
        for conflict in report.conflicts:
            lines.append(f"conflict: {conflict}")
        blocks.append("\n".join(lines))
    if errors:
        error_lines = [
            f"error: {dataset} {variant}: {message}"
            for dataset, variant, message in errors
        ]
        blocks.append("\n".join(error_lines))
    return "\n\n".join(blocks) + "\n"


def render(
    reports: list[MergeReport], errors: list[tuple[str, str, str]] | None = None
) -> tuple[str, str]:
    return render_text(reports, errors), render_csv(reports)
