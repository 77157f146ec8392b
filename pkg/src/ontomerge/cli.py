"""Command-line entry point: merge, compare, matrix, gen-fixture, verify-report.

Every report-producing command writes a flat text report, a CSV table,
and (unless --no-figures) rendered charts into the output directory,
plus a manifest.json capturing inputs and flags so that verify-report
can re-derive everything from disk.

Exit codes: 1 for input or parse problems, 2 when an enabled merge
requirement is still violated in the final result, 3 when refinement
does not converge.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import figures
from .core import Ontology
from .errors import MergeToolError, OntoParseError, RefinementDidNotConverge
from .formats import load_mapping, load_ontology, parse_ontology, serialize_ontology
from .generator import PRESETS, generate_dataset, write_dataset
from .merge_model import MergeModel, as_ontology
from .metrics import (
    MergeReport,
    compute_report,
    count_redundant_entities,
    render_csv,
    render_text,
)
from .refine import (
    ALL_RULES,
    RefinementConfig,
    check_preservation,
    count_oneness_violations,
    count_taxonomy_cycles,
    find_unconnected_classes,
)
from .strategies import (
    ALL_VARIANTS,
    MatrixDataset,
    Strategy,
    StrategyConfig,
    run_matrix,
    run_strategy,
    variant_config,
)

DEFAULT_WT = 0.75
DEFAULT_WNT = 0.5


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_ontologies(paths) -> list[Ontology]:
    ontologies = []
    for path in paths:
        try:
            ontologies.append(load_ontology(path))
        except OSError as exc:
            _fail(f"cannot read ontology file {path}: {exc}")
        except OntoParseError as exc:
            _fail(f"{path}: {exc}")
    return ontologies


def _load_mappings(paths) -> list:
    mappings = []
    for path in paths:
        try:
            mappings.append(load_mapping(path))
        except OSError as exc:
            _fail(f"cannot read mapping file {path}: {exc}")
        except OntoParseError as exc:
            _fail(f"{path}: {exc}")
    return mappings


def _parse_rules(gmr: str) -> frozenset:
    if not gmr.strip():
        return frozenset()
    rules = frozenset(r.strip().upper() for r in gmr.split(",") if r.strip())
    unknown = rules - set(ALL_RULES)
    if unknown:
        _fail(f"unknown refinement rules: {', '.join(sorted(unknown))}")
    return rules


def _make_config(
    strategy: str,
    variant: str | None,
    wt: float,
    wnt: float,
    gmr: str,
    refine_local: bool,
    refine_global: bool,
    jobs: int,
    confidence_cutoff: float,
    drop_self_maps: bool,
) -> StrategyConfig:
    rules = _parse_rules(gmr)
    if variant:
        config = variant_config(variant.upper(), weights=(wt, wnt), jobs=jobs, rules=rules)
    else:
        config = StrategyConfig(
            strategy=Strategy(strategy),
            refinement=RefinementConfig(
                enabled_rules=rules,
                apply_local=refine_local,
                apply_global=refine_global,
            ),
            weights=(wt, wnt),
            jobs=jobs,
        )
    config.confidence_cutoff = confidence_cutoff
    config.drop_self_pairs = drop_self_maps
    return config


def _shuffled(ontologies: list[Ontology], shuffle_seed: int | None) -> list[Ontology]:
    if shuffle_seed is None:
        return ontologies
    import random

    shuffled = list(ontologies)
    random.Random(shuffle_seed).shuffle(shuffled)
    return shuffled


def _check_requirements(report: MergeReport, config: StrategyConfig) -> list[str]:
    """Post-conditions of the enabled rules on the final result."""
    if not config.refinement.apply_global or not config.refinement.enabled_rules:
        return []
    rules = config.refinement.enabled_rules
    conflict_text = " ".join(report.conflicts)
    violations = []
    if "R16" in rules and report.cyc > 0:
        violations.append(f"R16 enabled but {report.cyc} cycles remain")
    if "R15" in rules and report.on_count > 0:
        violations.append(
            f"R15 enabled but {report.on_count} properties keep multiple domains/ranges"
        )
    if "R19" in rules and report.c_u > 0 and "R19:" not in conflict_text:
        violations.append(f"R19 enabled but {report.c_u} classes stay unconnected")
    if "R7" in rules and report.str_count > 0 and "R7:" not in conflict_text:
        violations.append(
            f"R7 enabled but {report.str_count} source subclass edges stay unpreserved"
        )
    return violations


def _write_manifest(out: Path, payload: dict) -> None:
    (out / "manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _abspaths(paths) -> list[str]:
    return [str(Path(p).resolve()) for p in paths]


@click.group()
def main():
    """Merge several ontologies at once and measure how much work it took."""


_shared_options = [
    click.option("--map", "map_paths", multiple=True, help="Mapping file (.map); repeatable."),
    click.option("--wt", type=float, default=DEFAULT_WT, show_default=True, help="Taxonomic connectivity weight."),
    click.option("--wnt", type=float, default=DEFAULT_WNT, show_default=True, help="Non-taxonomic connectivity weight."),
    click.option("--gmr", default=",".join(ALL_RULES), show_default=True, help="Comma-separated refinement rules to enable."),
    click.option("--refine-local/--no-refine-local", default=True, show_default=True),
    click.option("--refine-global/--no-refine-global", default=True, show_default=True),
    click.option("--jobs", type=int, default=1, show_default=True, help="Concurrent block workers for intra-combination."),
    click.option("--confidence-cutoff", type=float, default=0.0, show_default=True),
    click.option("--drop-self-maps", is_flag=True, default=False, help="Ignore mapping pairs within a single ontology."),
    click.option("--shuffle-seed", type=int, default=None, help="Shuffle source order deterministically (binary strategies are order sensitive)."),
    click.option("--out", "out_dir", default=".", show_default=True, help="Output directory."),
    click.option("--figures/--no-figures", "render_figures", default=True, show_default=True, help="Render charts next to the CSV."),
]


def shared_options(func):
    for option in reversed(_shared_options):
        func = option(func)
    return func


@main.command()
@click.argument("ontology_paths", nargs=-1, required=True)
@click.option("--strategy", type=click.Choice([s.value for s in Strategy]), default="nary", show_default=True)
@click.option("--variant", default=None, help="V1..V12; overrides strategy and refinement flags.")
@click.option("--dataset", "dataset_name", default="dataset", show_default=True)
@click.option("--dump-blocks", is_flag=True, default=False, help="Write each block as block_<id>.onto.")
@shared_options
def merge(
    ontology_paths,
    strategy,
    variant,
    dataset_name,
    dump_blocks,
    map_paths,
    wt,
    wnt,
    gmr,
    refine_local,
    refine_global,
    jobs,
    confidence_cutoff,
    drop_self_maps,
    shuffle_seed,
    out_dir,
    render_figures,
):
    """Merge the given ontologies into merged.onto plus reports."""
    ontologies = _shuffled(_load_ontologies(ontology_paths), shuffle_seed)
    mappings = _load_mappings(map_paths)
    config = _make_config(
        strategy, variant, wt, wnt, gmr, refine_local, refine_global,
        jobs, confidence_cutoff, drop_self_maps,
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    try:
        result = run_strategy(ontologies, mappings, config)
    except RefinementDidNotConverge as exc:
        _fail(str(exc), code=3)
    except MergeToolError as exc:
        _fail(str(exc))

    report = compute_report(result, dataset_name, config.variant_id or "")
    (out / "merged.onto").write_text(
        serialize_ontology(as_ontology(result.model)), encoding="utf-8"
    )
    if dump_blocks:
        for sub in result.subs:
            (out / f"block_{sub.block_id}.onto").write_text(
                serialize_ontology(sub.ontology), encoding="utf-8"
            )
    text, table = render_text([report]), render_csv([report])
    (out / "report.txt").write_text(text, encoding="utf-8")
    (out / "report.csv").write_text(table, encoding="utf-8")
    _write_manifest(
        out,
        {
            "command": "merge",
            "dataset": dataset_name,
            "ontologies": _abspaths(ontology_paths),
            "mappings": _abspaths(map_paths),
            "strategy": strategy,
            "variant": variant,
            "wt": wt,
            "wnt": wnt,
            "gmr": gmr,
            "refine_local": refine_local,
            "refine_global": refine_global,
            "jobs": jobs,
            "confidence_cutoff": confidence_cutoff,
            "drop_self_maps": drop_self_maps,
            "shuffle_seed": shuffle_seed,
            "dump_blocks": dump_blocks,
        },
    )
    if render_figures:
        figures.save_run_summary(report, out / "run_summary.png")
    click.echo(text, nl=False)

    violations = _check_requirements(report, config)
    if violations:
        for violation in violations:
            click.echo(f"requirement violated: {violation}", err=True)
        sys.exit(2)


@main.command()
@click.argument("ontology_paths", nargs=-1, required=True)
@click.option("--dataset", "dataset_name", default="dataset", show_default=True)
@shared_options
def compare(
    ontology_paths,
    dataset_name,
    map_paths,
    wt,
    wnt,
    gmr,
    refine_local,
    refine_global,
    jobs,
    confidence_cutoff,
    drop_self_maps,
    shuffle_seed,
    out_dir,
    render_figures,
):
    """Run n-ary, balanced, and ladder on the same inputs and compare."""
    if len(ontology_paths) < 3:
        _fail(
            "compare needs at least three ontologies; with two sources the "
            "strategies coincide, run 'merge' instead"
        )
    ontologies = _shuffled(_load_ontologies(ontology_paths), shuffle_seed)
    mappings = _load_mappings(map_paths)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    reports = []
    for strategy in (Strategy.NARY, Strategy.BALANCED, Strategy.LADDER):
        config = _make_config(
            strategy.value, None, wt, wnt, gmr, refine_local, refine_global,
            jobs, confidence_cutoff, drop_self_maps,
        )
        try:
            result = run_strategy(ontologies, mappings, config)
        except RefinementDidNotConverge as exc:
            _fail(str(exc), code=3)
        except MergeToolError as exc:
            _fail(str(exc))
        reports.append(compute_report(result, dataset_name, ""))

    text, table = render_text(reports), render_csv(reports)
    (out / "compare.txt").write_text(text, encoding="utf-8")
    (out / "compare.csv").write_text(table, encoding="utf-8")
    _write_manifest(
        out,
        {
            "command": "compare",
            "dataset": dataset_name,
            "ontologies": _abspaths(ontology_paths),
            "mappings": _abspaths(map_paths),
            "wt": wt,
            "wnt": wnt,
            "gmr": gmr,
            "refine_local": refine_local,
            "refine_global": refine_global,
            "jobs": jobs,
            "confidence_cutoff": confidence_cutoff,
            "drop_self_maps": drop_self_maps,
            "shuffle_seed": shuffle_seed,
        },
    )
    if render_figures:
        figures.save_strategy_comparison(reports, out / "comparison.png")
    click.echo(text, nl=False)


@main.command()
@click.argument("ontology_paths", nargs=-1, required=True)
@click.option("--dataset", "dataset_name", default="dataset", show_default=True)
@click.option("--imperfect-map", "imperfect_paths", multiple=True, help="Noisy mapping files for the imperfect variants.")
@click.option("--variants", default=",".join(ALL_VARIANTS), show_default=True)
@shared_options
def matrix(
    ontology_paths,
    dataset_name,
    imperfect_paths,
    variants,
    map_paths,
    wt,
    wnt,
    gmr,
    refine_local,
    refine_global,
    jobs,
    confidence_cutoff,
    drop_self_maps,
    shuffle_seed,
    out_dir,
    render_figures,
):
    """Run the full variant grid (V1..V12) on one dataset."""
    ontologies = _shuffled(_load_ontologies(ontology_paths), shuffle_seed)
    perfect = _load_mappings(map_paths)
    imperfect = _load_mappings(imperfect_paths) if imperfect_paths else None
    variant_ids = [v.strip().upper() for v in variants.split(",") if v.strip()]
    unknown = [v for v in variant_ids if v not in ALL_VARIANTS]
    if unknown:
        _fail(f"unknown variants: {', '.join(unknown)}")

    dataset = MatrixDataset(
        name=dataset_name,
        ontologies=ontologies,
        perfect_mappings=perfect,
        imperfect_mappings=imperfect,
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports, errors = run_matrix(
        [dataset],
        variant_ids,
        weights=(wt, wnt),
        jobs=jobs,
        rules=_parse_rules(gmr),
        confidence_cutoff=confidence_cutoff,
        drop_self_pairs=drop_self_maps,
    )
    text, table = render_text(reports, errors), render_csv(reports)
    (out / "matrix.txt").write_text(text, encoding="utf-8")
    (out / "matrix.csv").write_text(table, encoding="utf-8")
    _write_manifest(
        out,
        {
            "command": "matrix",
            "dataset": dataset_name,
            "ontologies": _abspaths(ontology_paths),
            "mappings": _abspaths(map_paths),
            "imperfect_mappings": _abspaths(imperfect_paths),
            "variants": variant_ids,
            "wt": wt,
            "wnt": wnt,
            "gmr": gmr,
            "jobs": jobs,
            "confidence_cutoff": confidence_cutoff,
            "drop_self_maps": drop_self_maps,
            "shuffle_seed": shuffle_seed,
        },
    )
    if render_figures and reports:
        figures.save_variant_overview(reports, out / "variants.png")
    click.echo(text, nl=False)
    if errors:
        sys.exit(2)


@main.command("gen-fixture")
@click.option("--n", type=int, default=3, show_default=True, help="Number of ontologies.")
@click.option("--size", type=int, default=12, show_default=True, help="Classes per ontology.")
@click.option("--overlap", type=float, default=0.3, show_default=True, help="Share of classes that correspond.")
@click.option("--components", type=int, default=1, show_default=True, help="Mapping-connected families.")
@click.option("--dirty", is_flag=True, default=False, help="Inject cycle-prone reversed edges.")
@click.option("--seed", type=int, default=0, show_default=True, envvar="ONTOMERGE_SEED")
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None, help="Write a bundled preset instead of a random dataset.")
@click.option("--out", "out_dir", default="fixture", show_default=True)
def gen_fixture(n, size, overlap, components, dirty, seed, preset, out_dir):
    """Write a synthetic dataset (.onto files plus mapping files)."""
    try:
        if preset:
            ontologies, mappings = PRESETS[preset]()
            written = write_dataset(out_dir, ontologies, mappings)
        else:
            if n < 2:
                _fail("need --n of at least 2")
            ontologies, perfect, imperfect = generate_dataset(
                n, size, overlap, seed, components=components, dirty=dirty
            )
            written = write_dataset(out_dir, ontologies, perfect, imperfect)
    except MergeToolError as exc:
        _fail(str(exc))
    for path in written:
        click.echo(str(path))


def _rerun_from_manifest(manifest: dict):
    ontologies = _load_ontologies(manifest["ontologies"])
    ontologies = _shuffled(ontologies, manifest.get("shuffle_seed"))
    mappings = _load_mappings(manifest.get("mappings", ()))
    command = manifest["command"]
    if command == "merge":
        config = _make_config(
            manifest["strategy"],
            manifest.get("variant"),
            manifest["wt"],
            manifest["wnt"],
            manifest["gmr"],
            manifest["refine_local"],
            manifest["refine_global"],
            manifest["jobs"],
            manifest["confidence_cutoff"],
            manifest["drop_self_maps"],
        )
        result = run_strategy(ontologies, mappings, config)
        report = compute_report(result, manifest["dataset"], config.variant_id or "")
        return [report], result
    if command == "compare":
        reports = []
        for strategy in (Strategy.NARY, Strategy.BALANCED, Strategy.LADDER):
            config = _make_config(
                strategy.value,
                None,
                manifest["wt"],
                manifest["wnt"],
                manifest["gmr"],
                manifest["refine_local"],
                manifest["refine_global"],
                manifest["jobs"],
                manifest["confidence_cutoff"],
                manifest["drop_self_maps"],
            )
            result = run_strategy(ontologies, mappings, config)
            reports.append(compute_report(result, manifest["dataset"], ""))
        return reports, None
    if command == "matrix":
        imperfect = (
            _load_mappings(manifest.get("imperfect_mappings", ())) or None
        )
        dataset = MatrixDataset(
            name=manifest["dataset"],
            ontologies=ontologies,
            perfect_mappings=mappings,
            imperfect_mappings=imperfect,
        )
        reports, _ = run_matrix(
            [dataset],
            manifest["variants"],
            weights=(manifest["wt"], manifest["wnt"]),
            jobs=manifest["jobs"],
            rules=_parse_rules(manifest.get("gmr", ",".join(ALL_RULES))),
            confidence_cutoff=manifest.get("confidence_cutoff", 0.0),
            drop_self_pairs=manifest.get("drop_self_maps", False),
        )
        return reports, None
    _fail(f"manifest has unknown command {command!r}")


def _mask_wall_ms(csv_text: str) -> str:
    lines = csv_text.strip("\n").splitlines()
    if not lines:
        return csv_text
    header = lines[0].split(",")
    try:
        idx = header.index("wall_ms")
    except ValueError:
        return csv_text
    masked = [lines[0]]
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) == len(header):
            cells[idx] = "-"
        masked.append(",".join(cells))
    return "\n".join(masked)


@main.command("verify-report")
@click.option("--dir", "run_dir", default=".", show_default=True, help="Directory holding manifest.json and report outputs.")
def verify_report(run_dir):
    """Re-derive a written report from the on-disk artifacts and compare."""
    run = Path(run_dir)
    manifest_path = run / "manifest.json"
    if not manifest_path.exists():
        _fail(f"no manifest.json in {run}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    command = manifest["command"]
    csv_name = {"merge": "report.csv", "compare": "compare.csv", "matrix": "matrix.csv"}[
        command
    ]
    csv_path = run / csv_name
    if not csv_path.exists():
        _fail(f"missing {csv_name} in {run}")

    try:
        reports, result = _rerun_from_manifest(manifest)
    except RefinementDidNotConverge as exc:
        _fail(str(exc), code=3)
    except MergeToolError as exc:
        _fail(str(exc))

    mismatches: list[str] = []
    recomputed = _mask_wall_ms(render_csv(reports))
    on_disk = _mask_wall_ms(csv_path.read_text(encoding="utf-8"))
    if recomputed != on_disk:
        mismatches.append(f"{csv_name} does not match the recomputed table")

    if command == "merge" and result is not None:
        merged_path = run / "merged.onto"
        if not merged_path.exists():
            mismatches.append("merged.onto is missing")
        else:
            disk_text = merged_path.read_text(encoding="utf-8")
            if serialize_ontology(as_ontology(result.model)) != disk_text:
                mismatches.append("merged.onto differs from the recomputed merge")
            else:
                parsed = parse_ontology(disk_text)
                shadow = MergeModel(
                    entities=parsed.entities,
                    axioms=parsed.axioms,
                    integrated_of=result.model.integrated_of,
                    source_ontologies=result.model.source_ontologies,
                )
                report = reports[0]
                preservation = check_preservation(
                    shadow, shadow.source_ontologies, result.corr
                )
                cyc, _ = count_taxonomy_cycles(shadow)
                checks = [
                    ("class_cov", preservation.class_cov, report.class_cov),
                    ("prop_cov", preservation.prop_cov, report.prop_cov),
                    ("inst_cov", preservation.inst_cov, report.inst_cov),
                    ("str", preservation.unpreserved_structures, report.str_count),
                    ("on", count_oneness_violations(shadow), report.on_count),
                    ("c_u", len(find_unconnected_classes(shadow)), report.c_u),
                    ("cyc", cyc, report.cyc),
                    ("redundancy", count_redundant_entities(shadow), report.redundancy),
                ]
                for name, from_disk, from_report in checks:
                    if from_disk != from_report:
                        mismatches.append(
                            f"{name} recomputed from merged.onto is {from_disk}, "
                            f"report says {from_report}"
                        )

    if mismatches:
        for m in mismatches:
            click.echo(f"mismatch: {m}", err=True)
        sys.exit(1)
    click.echo(f"verified: {csv_path} matches a clean re-derivation")


if __name__ == "__main__":
    main()
