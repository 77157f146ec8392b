import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from ontomerge.cli import main

runner = CliRunner()


@pytest.fixture(scope="module")
def fig1_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig1")
    result = runner.invoke(main, ["gen-fixture", "--preset", "fig1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    return out


def _fig1_args(fig1_dir):
    ontos = [str(fig1_dir / f"o{i}.onto") for i in range(1, 6)]
    return ontos + ["--map", str(fig1_dir / "perfect.map")]


def test_merge_writes_outputs(fig1_dir, tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(
        main,
        ["merge", *_fig1_args(fig1_dir), "--out", str(out), "--no-figures"],
    )
    assert result.exit_code == 0, result.output
    for name in ("merged.onto", "report.txt", "report.csv", "manifest.json"):
        assert (out / name).exists()
    assert "combine: 6" in result.output


def test_merge_dump_blocks_and_figure(fig1_dir, tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(
        main,
        ["merge", *_fig1_args(fig1_dir), "--out", str(out), "--dump-blocks"],
    )
    assert result.exit_code == 0, result.output
    blocks = sorted(p.name for p in out.glob("block_*.onto"))
    assert blocks == ["block_1.onto", "block_2.onto", "block_3.onto"]
    assert (out / "run_summary.png").exists()


def test_merge_missing_mapping_file_exits_one(fig1_dir, tmp_path):
    missing = tmp_path / "nope.map"
    result = runner.invoke(
        main,
        [
            "merge",
            str(fig1_dir / "o1.onto"),
            "--map",
            str(missing),
            "--out",
            str(tmp_path / "x"),
            "--no-figures",
        ],
    )
    assert result.exit_code == 1
    assert "nope.map" in result.output


def test_merge_parse_error_exits_one(tmp_path):
    bad = tmp_path / "bad.onto"
    bad.write_text("CLASS x:Y\n")
    result = runner.invoke(
        main, ["merge", str(bad), "--out", str(tmp_path / "o"), "--no-figures"]
    )
    assert result.exit_code == 1


def test_merge_variant_v3_reports_zero_refinements(fig1_dir, tmp_path):
    out = tmp_path / "v3"
    result = runner.invoke(
        main,
        [
            "merge",
            *_fig1_args(fig1_dir),
            "--variant",
            "V3",
            "--out",
            str(out),
            "--no-figures",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "r_local: 0" in result.output
    assert "r_global: 0" in result.output


def test_merge_reproducible_bytes(fig1_dir, tmp_path):
    texts = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(
            main,
            ["merge", *_fig1_args(fig1_dir), "--out", str(out), "--no-figures"],
        )
        assert result.exit_code == 0
        texts.append((out / "merged.onto").read_bytes())
    assert texts[0] == texts[1]


def test_compare_rejects_two_sources(fig1_dir, tmp_path):
    result = runner.invoke(
        main,
        [
            "compare",
            str(fig1_dir / "o1.onto"),
            str(fig1_dir / "o2.onto"),
            "--out",
            str(tmp_path / "c"),
            "--no-figures",
        ],
    )
    assert result.exit_code == 1
    assert "at least three" in result.output


def test_compare_reports_table_counts(fig1_dir, tmp_path):
    out = tmp_path / "cmp"
    result = runner.invoke(
        main,
        ["compare", *_fig1_args(fig1_dir), "--out", str(out), "--dataset", "fig1"],
    )
    assert result.exit_code == 0, result.output
    lines = (out / "compare.csv").read_text().splitlines()
    assert len(lines) == 4
    rows = {line.split(",")[2]: line.split(",") for line in lines[1:]}
    header = lines[0].split(",")
    merges = header.index("merges")
    assert rows["nary"][merges] == "1"
    assert rows["ladder"][merges] == "4"
    assert rows["balanced"][merges] == "4"
    assert (out / "comparison.png").exists()


def test_matrix_full_grid(fig1_dir, tmp_path):
    out = tmp_path / "mx"
    result = runner.invoke(
        main,
        ["matrix", *_fig1_args(fig1_dir), "--out", str(out), "--dataset", "fig1"],
    )
    assert result.exit_code == 0, result.output
    lines = (out / "matrix.csv").read_text().splitlines()
    assert len(lines) == 13
    assert (out / "variants.png").exists()


def test_gen_fixture_deterministic(tmp_path):
    outs = []
    for name in ("g1", "g2"):
        out = tmp_path / name
        result = runner.invoke(
            main,
            [
                "gen-fixture",
                "--n",
                "3",
                "--size",
                "10",
                "--overlap",
                "0.4",
                "--seed",
                "9",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0
        outs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert outs[0] == outs[1]


def test_gen_fixture_zero_overlap_no_pairs(tmp_path):
    out = tmp_path / "zero"
    result = runner.invoke(
        main,
        ["gen-fixture", "--n", "2", "--size", "8", "--overlap", "0", "--out", str(out)],
    )
    assert result.exit_code == 0
    assert (out / "perfect.map").read_text() == "\n"


def test_gen_fixture_rejects_bad_params(tmp_path):
    result = runner.invoke(
        main,
        ["gen-fixture", "--n", "1", "--out", str(tmp_path / "bad")],
    )
    assert result.exit_code == 1


def test_verify_report_passes_on_untouched_run(fig1_dir, tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(
        main,
        ["merge", *_fig1_args(fig1_dir), "--out", str(out), "--no-figures"],
    )
    assert result.exit_code == 0
    verify = runner.invoke(main, ["verify-report", "--dir", str(out)])
    assert verify.exit_code == 0, verify.output
    assert "verified" in verify.output


def test_verify_report_detects_tampering(fig1_dir, tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(
        main,
        ["merge", *_fig1_args(fig1_dir), "--out", str(out), "--no-figures"],
    )
    assert result.exit_code == 0
    csv_path = out / "report.csv"
    tampered = csv_path.read_text().replace(",6,", ",7,", 1)
    csv_path.write_text(tampered)
    verify = runner.invoke(main, ["verify-report", "--dir", str(out)])
    assert verify.exit_code == 1
    assert "mismatch" in verify.output


def test_verify_report_detects_model_tampering(fig1_dir, tmp_path):
    out = tmp_path / "run"
    runner.invoke(
        main, ["merge", *_fig1_args(fig1_dir), "--out", str(out), "--no-figures"]
    )
    merged = out / "merged.onto"
    merged.write_text(merged.read_text() + "CLASS smuggled:X\n")
    verify = runner.invoke(main, ["verify-report", "--dir", str(out)])
    assert verify.exit_code == 1


def test_manifest_contents(fig1_dir, tmp_path):
    out = tmp_path / "run"
    runner.invoke(
        main,
        ["merge", *_fig1_args(fig1_dir), "--out", str(out), "--no-figures"],
    )
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "merge"
    assert manifest["strategy"] == "nary"
    assert len(manifest["ontologies"]) == 5
    assert all(Path(p).is_absolute() for p in manifest["ontologies"])


def test_jobs_flag_produces_identical_output(fig1_dir, tmp_path):
    texts = []
    for jobs in ("1", "4"):
        out = tmp_path / f"j{jobs}"
        result = runner.invoke(
            main,
            [
                "merge",
                *_fig1_args(fig1_dir),
                "--jobs",
                jobs,
                "--out",
                str(out),
                "--no-figures",
            ],
        )
        assert result.exit_code == 0
        texts.append((out / "merged.onto").read_bytes())
    assert texts[0] == texts[1]


def test_requirement_check_flags_violations():
    from ontomerge.cli import _check_requirements
    from ontomerge.metrics import MergeReport
    from ontomerge.strategies import OpCounters, StrategyConfig

    def report(**overrides):
        base = dict(
            dataset="d",
            variant="",
            strategy="nary",
            counters=OpCounters(),
            k=1,
            ds_pct=0.0,
            tr_pct=0.0,
            ov_pct=0.0,
            max_card=0,
            class_count=1,
            prop_count=0,
            inst_count=0,
            class_cov=1.0,
            prop_cov=1.0,
            inst_cov=1.0,
            str_count=0,
            on_count=0,
            c_u=0,
            cyc=0,
        )
        base.update(overrides)
        return MergeReport(**base)

    config = StrategyConfig()
    assert _check_requirements(report(), config) == []
    assert any(
        "R16" in v for v in _check_requirements(report(cyc=2), config)
    )
    assert any(
        "R15" in v for v in _check_requirements(report(on_count=1), config)
    )
    # a recorded conflict diagnostic excuses leftover unpreserved structures
    excused = report(str_count=3, conflicts=["R7: restoring x -> y would re-create a cycle"])
    assert _check_requirements(excused, config) == []
    # with refinement disabled nothing is checked
    from ontomerge.refine import RefinementConfig

    off = StrategyConfig(refinement=RefinementConfig.none())
    assert _check_requirements(report(cyc=5), off) == []


def test_shuffle_seed_is_deterministic(fig1_dir, tmp_path):
    texts = []
    for name in ("s1", "s2"):
        out = tmp_path / name
        result = runner.invoke(
            main,
            [
                "merge",
                *_fig1_args(fig1_dir),
                "--shuffle-seed",
                "5",
                "--out",
                str(out),
                "--no-figures",
            ],
        )
        assert result.exit_code == 0
        texts.append((out / "merged.onto").read_bytes())
    assert texts[0] == texts[1]
