import csv
import io

import pytest

from ontomerge.generator import fig1_dataset, generate_dataset
from ontomerge.metrics import (
    CSV_COLUMNS,
    compute_report,
    count_redundant_entities,
    render,
    render_csv,
    render_text,
    sort_reports,
)
from ontomerge.refine import RefinementConfig, check_preservation, count_taxonomy_cycles
from ontomerge.strategies import Strategy, StrategyConfig, merge_nary

from conftest import make_ontology


def _no_refine():
    return StrategyConfig(refinement=RefinementConfig.none())


def test_identity_merge_report():
    onto = make_ontology(
        "a", classes=["a:X", "a:Y"], axioms=[("SUBCLASS", "a:X", "a:Y")]
    )
    result = merge_nary([onto], [], _no_refine())
    report = compute_report(result, "solo")
    assert (report.class_cov, report.prop_cov, report.inst_cov) == (1.0, 1.0, 1.0)
    assert report.str_count == 0
    assert report.on_count == 0
    assert report.c_u == 0
    assert report.cyc == 0
    assert report.redundancy == 0
    assert report.ov_pct == 0.0


def test_ds_pct_arithmetic():
    # 2 distributed is-a axioms out of 40 total would be 5%; verify the
    # formula on a small concrete model instead
    onto = make_ontology(
        "a",
        classes=["a:R1", "a:S1", "a:R2", "a:S2", "a:U"],
        axioms=[
            ("SUBCLASS", "a:S1", "a:R1"),
            ("SUBCLASS", "a:S2", "a:R2"),
            ("UNION", "a:U", "a:R1", "a:R2"),
        ],
    )
    result = merge_nary([onto], [], _no_refine())
    report = compute_report(result, "d")
    assert result.distributed.taxonomic_count() == 1
    assert report.ds_pct == pytest.approx(100.0 / 3.0)


def test_report_fields_match_per_metric_recomputation():
    ontologies, mappings = fig1_dataset()
    result = merge_nary(ontologies, mappings, _no_refine())
    report = compute_report(result, "fig1")
    preservation = check_preservation(
        result.model, result.model.source_ontologies, result.corr
    )
    assert report.class_cov == preservation.class_cov
    assert report.str_count == preservation.unpreserved_structures
    assert report.cyc == count_taxonomy_cycles(result.model)[0]
    assert report.max_card == result.corr.max_card()
    translated = sum(1 for ax in result.model.axioms if ax.translated)
    assert report.tr_pct == pytest.approx(
        100.0 * translated / len(result.model.axioms)
    )
    assert report.k == result.partition.k


def test_redundancy_counts_label_and_neighborhood_twins():
    onto = make_ontology(
        "a",
        classes=["a:R", "a:Twin1", "a:Twin2"],
        axioms=[("SUBCLASS", "a:Twin1", "a:R"), ("SUBCLASS", "a:Twin2", "a:R")],
    )
    # same neighborhoods but different labels: not redundant
    result = merge_nary([onto], [], _no_refine())
    assert count_redundant_entities(result.model) == 0
    # force equal labels
    from ontomerge.core import EntityId

    for iri in ("a:Twin1", "a:Twin2"):
        entity = result.model.entities[EntityId(iri)]
        result.model.entities[EntityId(iri)] = entity.with_labels(("Twin",))
    assert count_redundant_entities(result.model) == 1


def test_render_empty_is_header_only():
    text, table = render([])
    assert table == ",".join(CSV_COLUMNS) + "\n"
    assert text == "\n"


def test_render_single_row():
    onto = make_ontology("a", classes=["a:X"])
    result = merge_nary([onto], [], _no_refine())
    report = compute_report(result, "d", "V3")
    table = render_csv([report])
    rows = list(csv.reader(io.StringIO(table)))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 2
    assert rows[1][0] == "d"
    assert rows[1][1] == "V3"


def test_render_sorted_by_dataset_then_variant():
    onto = make_ontology("a", classes=["a:X"])
    result = merge_nary([onto], [], _no_refine())
    reports = [
        compute_report(result, ds, vid)
        for ds, vid in (
            ("d2", "V2"),
            ("d1", "V10"),
            ("d1", "V2"),
            ("d1", "V1"),
        )
    ]
    ordered = sort_reports(reports)
    assert [(r.dataset, r.variant) for r in ordered] == [
        ("d1", "V1"),
        ("d1", "V2"),
        ("d1", "V10"),
        ("d2", "V2"),
    ]


def test_render_deterministic_bytes():
    ontologies, mappings = fig1_dataset()
    result = merge_nary(ontologies, mappings, _no_refine())
    report = compute_report(result, "fig1")
    report.counters.wall_ms = 0.0
    once = render([report])
    again = render([report])
    assert once == again


def test_render_text_mentions_errors():
    text = render_text([], errors=[("d1", "V9", "boom")])
    assert "error: d1 V9: boom" in text


def test_coverage_above_one_annotated():
    onto = make_ontology("a", classes=["a:X"])
    result = merge_nary([onto], [], _no_refine())
    report = compute_report(result, "d")
    report.prop_cov = 1.05
    text = render_text([report])
    assert "above 1" in text


def test_all_csv_fields_recomputable():
    # recomputing the report from the same run output reproduces each field
    ontologies, perfect, _ = generate_dataset(n=4, size=14, overlap=0.4, seed=6)
    result = merge_nary(ontologies, perfect, StrategyConfig())
    first = compute_report(result, "d", "V1").row()
    second = compute_report(result, "d", "V1").row()
    assert first == second
