"""Bundled scenario figures: datasets plus rendered plots.

Each figure id names either a per-tally scenario panel (families 3, 4,
and 5), drawn as precision / sensitivity / specificity against tally, or
a sweep cluster (family 2), drawn as precision against one varied
parameter with one curve per tally. ``render_figure`` writes the
delimited dataset(s) and a PNG side by side; datasets alone are
available through :func:`build_panel_tables` / :func:`build_sweep_points`.

Values marked ``unverified-parameter`` in the bundled configs are
best-effort choices for constants the original scenarios leave unstated.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .comms import SweepPoint, sweep
from .config import load_bundled
from .errors import InvalidParamsError
from .metrics import MetricsTable, metrics_table, tail_aggregate
from .params import ModelParams
from .solve import steady_state
from .tableio import emit_sweep, emit_table

PANEL_WINDOW = (-12, 12)

PRECISION_COLOR = "#1f77b4"  # blue
SENSITIVITY_COLOR = "#ff7f0e"  # orange
SPECIFICITY_COLOR = "#7f7f7f"  # gray


@dataclass(frozen=True)
class PanelVariant:
    label: str
    params: ModelParams
    linestyle: str = "-"


@dataclass(frozen=True)
class PanelFigure:
    fig_id: str
    title: str
    variants: tuple[PanelVariant, ...]
    shade_tallies: tuple[int, ...] = ()


@dataclass(frozen=True)
class SweepPanel:
    letter: str
    axis: str
    values: tuple[float, ...]
    log_x: bool = False


@dataclass(frozen=True)
class SweepFigure:
    fig_id: str
    title: str
    base_config: str
    panels: tuple[SweepPanel, ...]
    curve_tallies: tuple[int, ...] = (1, 2, 3, 4, 5)


def _sweep_panels() -> tuple[SweepPanel, ...]:
    return (
        SweepPanel("a", "base_rate", tuple(np.logspace(-4, np.log10(0.5), 21)), log_x=True),
        SweepPanel("b", "replication_rate", tuple(np.linspace(0.02, 0.5, 17))),
        SweepPanel("c", "power", tuple(np.linspace(0.25, 0.95, 15))),
        SweepPanel("d", "false_positive_rate", tuple(np.linspace(0.01, 0.5, 15))),
        SweepPanel("e", "c_rep_negative", tuple(np.linspace(0.0, 1.0, 21))),
        SweepPanel("f", "c_rep_positive", tuple(np.linspace(0.0, 1.0, 21))),
        SweepPanel("g", "c_new_negative", tuple(np.linspace(0.0, 1.0, 21))),
    )


def _panel_figures() -> dict[str, PanelFigure]:
    figs: dict[str, PanelFigure] = {}

    for fig_id, title in (
        ("3a", "positive replications only"),
        ("3b", "negative replications only"),
        ("3d", "full communication"),
    ):
        params = load_bundled(f"fig{fig_id}")
        figs[fig_id] = PanelFigure(fig_id, title, (PanelVariant("solid", params),))

    params_3c = load_bundled("fig3c")
    dashed_3c = replace(params_3c, comm=replace(params_3c.comm, rep_positive=0.2))
    figs["3c"] = PanelFigure(
        "3c",
        "both replication directions; dashed: positive replications 20% published",
        (
            PanelVariant("solid", params_3c, "-"),
            PanelVariant("dashed", dashed_3c, "--"),
        ),
    )

    for fig_id, title in (
        ("4a", "targeted replication, power 0.8"),
        ("4b", "targeted replication, power 0.6"),
        ("4c", "targeted replication, power 0.6, target includes 0"),
    ):
        params = load_bundled(f"fig{fig_id}")
        untargeted = replace(params, target_fraction=0.0, target_tallies=frozenset())
        figs[fig_id] = PanelFigure(
            fig_id,
            title,
            (
                PanelVariant("targeted", params, "-"),
                PanelVariant("untargeted", untargeted, "--"),
            ),
            shade_tallies=tuple(sorted(params.target_tallies)),
        )

    for fig_id, title in (
        ("5a", "weak initial studies, strong replications"),
        ("5b", "strong initial studies, weak replications"),
        ("5c", "as 5a, negative replications 10% published"),
        ("5d", "as 5b, negative replications 10% published"),
    ):
        figs[fig_id] = PanelFigure(
            fig_id, title, (PanelVariant("solid", load_bundled(f"fig{fig_id}")),)
        )
    return figs


def _sweep_figures() -> dict[str, SweepFigure]:
    return {
        "2-top": SweepFigure(
            "2-top", "precision by tally, auspicious baseline", "fig2_top", _sweep_panels()
        ),
        "2-bottom": SweepFigure(
            "2-bottom", "precision by tally, pessimistic baseline", "fig2_bottom", _sweep_panels()
        ),
    }


def figure_ids() -> list[str]:
    ids = sorted(_panel_figures()) + sorted(_sweep_figures())
    return ids + ["2", "all"]


def build_panel_tables(fig: PanelFigure, tol: float = 1e-12) -> list[tuple[str, MetricsTable]]:
    """(variant label, folded metrics table) for each variant of a panel."""
    out = []
    for variant in fig.variants:
        dist = steady_state(variant.params, tol=tol)
        table = tail_aggregate(metrics_table(dist), PANEL_WINDOW)
        out.append((variant.label, table))
    return out


def build_sweep_points(
    figure: SweepFigure, panel: SweepPanel, tol: float = 1e-12
) -> list[SweepPoint]:
    base = load_bundled(figure.base_config)
    return sweep(base, panel.axis, panel.values, window=PANEL_WINDOW, tol=tol)


def _plot_panel(fig: PanelFigure, tables: list[tuple[str, MetricsTable]], path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    figure, ax = plt.subplots(figsize=(6.0, 4.0))
    if fig.shade_tallies:
        ax.axvspan(
            min(fig.shade_tallies) - 0.5,
            max(fig.shade_tallies) + 0.5,
            color="pink",
            alpha=0.35,
            label="target tallies",
        )
    for (label, table), variant in zip(tables, fig.variants):
        tallies = [row.tally for row in table.rows]
        suffix = f" ({label})" if len(tables) > 1 else ""
        ax.plot(
            tallies,
            [row.precision for row in table.rows],
            variant.linestyle,
            color=PRECISION_COLOR,
            label=f"precision{suffix}",
        )
        ax.plot(
            tallies,
            [row.sensitivity for row in table.rows],
            variant.linestyle,
            color=SENSITIVITY_COLOR,
            label=f"sensitivity{suffix}",
        )
        ax.plot(
            tallies,
            [row.specificity for row in table.rows],
            variant.linestyle,
            color=SPECIFICITY_COLOR,
            label=f"specificity{suffix}",
        )
    ax.set_xlabel("tally")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"figure {fig.fig_id}: {fig.title}", fontsize=10)
    ax.legend(fontsize=7)
    figure.tight_layout()
    figure.savefig(path, dpi=150)
    plt.close(figure)


def _plot_sweep(figure_def: SweepFigure, panel_points, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = len(figure_def.panels)
    fig, axes = plt.subplots(1, n, figsize=(2.4 * n, 3.0), sharey=True)
    for ax, panel, points in zip(axes, figure_def.panels, panel_points):
        for tally in figure_def.curve_tallies:
            xs = [p.axis_value for p in points]
            ys = [p.table.row(tally).precision for p in points]
            ax.plot(xs, ys, "--" if tally % 2 == 0 else "-", label=f"s={tally}")
        if panel.log_x:
            ax.set_xscale("log")
        ax.set_xlabel(panel.axis.replace("_", " "), fontsize=8)
        ax.tick_params(labelsize=7)
        ax.set_ylim(-0.02, 1.02)
    axes[0].set_ylabel("precision")
    axes[-1].legend(fontsize=7)
    fig.suptitle(f"figure {figure_def.fig_id}: {figure_def.title}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figure(
    fig_id: str, out_dir: str, tol: float = 1e-12, plot: bool = True
) -> list[str]:
    """Write the dataset(s) and plot for one figure id into ``out_dir``.

    Returns the created file paths. ``--id 2`` renders both sweep
    clusters; ``--id all`` renders everything.
    """
    panels = _panel_figures()
    sweeps = _sweep_figures()
    if fig_id == "all":
        created = []
        for fid in sorted(panels) + sorted(sweeps):
            created.extend(render_figure(fid, out_dir, tol, plot))
        return created
    if fig_id == "2":
        return render_figure("2-top", out_dir, tol, plot) + render_figure(
            "2-bottom", out_dir, tol, plot
        )

    os.makedirs(out_dir, exist_ok=True)
    created = []
    if fig_id in panels:
        fig = panels[fig_id]
        tables = build_panel_tables(fig, tol)
        for label, table in tables:
            suffix = f"_{label}" if len(tables) > 1 else ""
            path = os.path.join(out_dir, f"fig{fig_id}{suffix}.csv")
            emit_table(table, "csv", path)
            created.append(path)
        if plot:
            path = os.path.join(out_dir, f"fig{fig_id}.png")
            _plot_panel(fig, tables, path)
            created.append(path)
        return created
    if fig_id in sweeps:
        figure_def = sweeps[fig_id]
        tag = fig_id.replace("-", "_")
        panel_points = []
        for panel in figure_def.panels:
            points = build_sweep_points(figure_def, panel, tol)
            panel_points.append(points)
            path = os.path.join(out_dir, f"fig{tag}_{panel.letter}_{panel.axis}.csv")
            emit_sweep(points, "csv", path)
            created.append(path)
        if plot:
            path = os.path.join(out_dir, f"fig{tag}.png")
            _plot_sweep(figure_def, panel_points, path)
            created.append(path)
        return created
    raise InvalidParamsError(f"unknown figure id {fig_id!r}; have {figure_ids()}")
