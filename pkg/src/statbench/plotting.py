"""Matplotlib figures written next to the CSV/JSON outputs of the CLI."""
from __future__ import annotations

import math
import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .diagnostics import conflicts_at, diversity_at  # noqa: E402
from .harness import AggregateReport, EpisodeLog  # noqa: E402
from .stats import Comparison, difference_ci  # noqa: E402

# the five headline diagnostics, in reporting order
MAIN_METRICS = [
    "episode_return",
    "conflict_rate",
    "conflicts_per_task",
    "per_agent_diversity",
    "throughput",
]
MECHANISM_METRICS = [
    "forced_idle_rate",
    "decision_active_fraction",
    "conflicts_per_decision_opportunity",
    "diversity_per_decision_active_agent",
]

LABELS = {
    "episode_return": "Return",
    "conflict_rate": "Conflict rate",
    "conflicts_per_task": "Conflicts / task",
    "per_agent_diversity": "Per-agent diversity",
    "throughput": "Throughput",
    "forced_idle_rate": "Forced idle rate",
    "decision_active_fraction": "Decision-active frac.",
    "conflicts_per_decision_opportunity": "Conflicts / decision opp.",
    "diversity_per_decision_active_agent": "Diversity / active agent",
}


def publication_style(width: float = 8.0, height: float | None = None) -> dict:
    """rcParams for compact, readable figures; returns the figure size used."""
    golden = (math.sqrt(5) - 1.0) / 2.0
    if height is None:
        height = width * golden
    matplotlib.rcParams.update({
        "font.size": 9,
        "axes.titlesize": 9,
        "axes.labelsize": 9,
        "xtick.labelsize": 8,
        "ytick.labelsize": 8,
        "legend.fontsize": 8,
        "axes.spines.top": False,
        "axes.spines.right": False,
        "savefig.dpi": 150,
    })
    return {"figsize": (width, height)}


def _grid(k: int, ncols: int = 3):
    nrows = max(1, math.ceil(k / ncols))
    ncols = min(ncols, k)
    fig, axes = plt.subplots(nrows, ncols, **publication_style(3.0 * ncols, 2.4 * nrows), squeeze=False)
    flat = [ax for row in axes for ax in row]
    for ax in flat[k:]:
        ax.set_visible(False)
    return fig, flat[:k]


def _save(fig, path: str | os.PathLike) -> str:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return os.fspath(path)


def plot_episode_timeline(log: EpisodeLog, path: str | os.PathLike) -> str:
    """Per-step conflicts, diversity, decision activity and cumulative completions."""
    t = [rec.t for rec in log.steps]
    k = [conflicts_at(rec.selections) for rec in log.steps]
    d = [diversity_at(rec.final_actions) for rec in log.steps]
    active = [rec.decision_active for rec in log.steps]
    done = []
    total = 0
    for rec in log.steps:
        total += len(rec.completions)
        done.append(total)

    fig, axes = plt.subplots(2, 1, sharex=True, **publication_style(7.0, 4.5))
    axes[0].step(t, k, where="post", label="conflicts $K_t$", color="tab:red")
    axes[0].step(t, d, where="post", label="diversity $D_t$", color="tab:blue")
    axes[0].step(t, active, where="post", label="decision-active agents", color="0.5", lw=0.8)
    axes[0].legend(loc="upper right", frameon=False)
    axes[0].set_ylabel("count")
    axes[1].plot(t, done, color="tab:green")
    axes[1].axhline(log.cfg.m, color="0.6", ls="--", lw=0.8)
    axes[1].set_ylabel("tasks completed")
    axes[1].set_xlabel("timestep")
    axes[0].set_title(f"{log.cfg.label} / {log.policy} / seed {log.seed}")
    return _save(fig, path)


def plot_report(report: AggregateReport, path: str | os.PathLike,
                metrics: Sequence[str] = MAIN_METRICS + MECHANISM_METRICS) -> str:
    """One panel per metric: per-seed means as points, the mean with its 95% interval."""
    metrics = [m for m in metrics if m in report.metrics]
    fig, axes = _grid(len(metrics))
    for ax, key in zip(axes, metrics):
        s = report.metrics[key]
        k = len(s.per_seed)
        xs = [-0.3 + 0.6 * i / (k - 1) if k > 1 else 0.0 for i in range(k)]
        ax.scatter(xs, s.per_seed, s=12, color="0.55", zorder=2)
        ax.errorbar([0.6], [s.mean], yerr=[s.ci95], fmt="o", color="k", capsize=4, zorder=3)
        ax.set_xlim(-0.5, 1.1)
        ax.set_xticks([0, 0.6])
        ax.set_xticklabels(["seeds", "mean±CI"])
        ax.set_title(LABELS.get(key, key))
    fig.suptitle(f"{report.config} / {report.policy} ({report.seed_count} seeds x {report.episodes_per_seed} episodes)",
                 fontsize=9)
    return _save(fig, path)


def plot_comparison(report_a: AggregateReport, report_b: AggregateReport,
                    rows: Sequence[Comparison], path: str | os.PathLike) -> str:
    """Mean change (b minus a) per metric with a Welch 95% interval, marked when significant."""
    fig, axes = _grid(len(rows))
    for ax, row in zip(axes, rows):
        a = report_a.metrics[row.metric].per_seed
        b = report_b.metrics[row.metric].per_seed
        half = difference_ci(a, b)
        color = "tab:blue" if row.direction == "increase" else "tab:red" if row.direction == "decrease" else "0.6"
        ax.bar([0], [row.delta], color=color, alpha=0.8 if row.significant else 0.35, width=0.5)
        ax.errorbar([0], [row.delta], yerr=[half], fmt="none", ecolor="k", capsize=4)
        ax.axhline(0, color="0.3", lw=0.8)
        ax.set_xticks([])
        ax.set_xlim(-1, 1)
        ax.set_title(f"{LABELS.get(row.metric, row.metric)}  {row.cell}")
    fig.suptitle(f"{report_a.config}/{report_a.policy}  ->  {report_b.config}/{report_b.policy}", fontsize=9)
    return _save(fig, path)
