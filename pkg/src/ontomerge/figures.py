"""Chart rendering for merge reports; written next to the CSV output.

matplotlib is imported lazily so that report-only runs never pay for it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

DPI = 120
BAR_WIDTH = 0.35


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_run_summary(report, path: str | Path) -> Path:
    """One run: coverage ratios next to the requirement statistics."""
    plt = _plt()
    fig, (left, right) = plt.subplots(1, 2, figsize=(8, 3.2), dpi=DPI)

    names = ["class", "property", "instance"]
    values = [report.class_cov, report.prop_cov, report.inst_cov]
    left.bar(names, values, color="#4878a8")
    left.axhline(1.0, color="grey", linewidth=0.8, linestyle="--")
    left.set_ylim(0, max(1.1, max(values) + 0.05))
    left.set_title("coverage")

    metric_names = ["str", "on", "c_u", "cyc", "R_L", "R_G"]
    metric_values = [
        report.str_count,
        report.on_count,
        report.c_u,
        report.cyc,
        report.counters.r_local,
        report.counters.r_global,
    ]
    right.bar(metric_names, metric_values, color="#a85448")
    right.set_title("requirement statistics")

    fig.suptitle(f"{report.dataset} {report.variant or report.strategy}")
    fig.tight_layout()
    target = Path(path)
    fig.savefig(target)
    plt.close(fig)
    return target


def save_strategy_comparison(reports: Sequence, path: str | Path) -> Path:
    """Strategy-vs-strategy bars for the operation counters."""
    plt = _plt()
    order = {"nary": 0, "balanced": 1, "ladder": 2}
    rows = sorted(reports, key=lambda r: order.get(r.strategy, 9))
    labels = [r.strategy for r in rows]
    panels = [
        ("corresponding entities", [r.counters.cor for r in rows]),
        ("translated axioms", [r.counters.tr for r in rows]),
        ("global refinements", [r.counters.r_global for r in rows]),
        ("merge processes", [r.counters.merges for r in rows]),
    ]
    fig, axes = plt.subplots(1, len(panels), figsize=(11, 3.0), dpi=DPI)
    for ax, (title, values) in zip(axes, panels):
        ax.bar(labels, values, color=["#4878a8", "#8a8a4a", "#a85448"])
        ax.set_title(title, fontsize=9)
        ax.tick_params(labelsize=8)
    fig.suptitle(f"strategy comparison: {rows[0].dataset}")
    fig.tight_layout()
    target = Path(path)
    fig.savefig(target)
    plt.close(fig)
    return target


def save_variant_overview(reports: Sequence, path: str | Path) -> Path:
    """Variant grid: coverage on top, requirement statistics below."""
    plt = _plt()
    from .metrics import sort_reports

    rows = sort_reports(list(reports))
    labels = [f"{r.variant or r.strategy}" for r in rows]
    x = range(len(rows))

    fig, (top, bottom) = plt.subplots(2, 1, figsize=(max(7, len(rows) * 0.9), 6), dpi=DPI)
    top.bar(
        [i - BAR_WIDTH for i in x],
        [r.class_cov for r in rows],
        BAR_WIDTH,
        label="class",
        color="#4878a8",
    )
    top.bar(x, [r.prop_cov for r in rows], BAR_WIDTH, label="property", color="#8a8a4a")
    top.bar(
        [i + BAR_WIDTH for i in x],
        [r.inst_cov for r in rows],
        BAR_WIDTH,
        label="instance",
        color="#a85448",
    )
    top.set_xticks(list(x), labels, fontsize=8)
    top.axhline(1.0, color="grey", linewidth=0.8, linestyle="--")
    top.set_title("coverage per variant")
    top.legend(fontsize=8)

    series = [
        ("R_L", [r.counters.r_local for r in rows]),
        ("R_G", [r.counters.r_global for r in rows]),
        ("on", [r.on_count for r in rows]),
        ("C_u", [r.c_u for r in rows]),
        ("cyc", [r.cyc for r in rows]),
    ]
    width = 0.16
    for offset, (name, values) in enumerate(series):
        bottom.bar(
            [i + (offset - 2) * width for i in x], values, width, label=name
        )
    bottom.set_xticks(list(x), labels, fontsize=8)
    bottom.set_title("refinements and requirement statistics per variant")
    bottom.legend(fontsize=8)

    fig.suptitle(rows[0].dataset if rows else "matrix")
    fig.tight_layout()
    target = Path(path)
    fig.savefig(target)
    plt.close(fig)
    return target
