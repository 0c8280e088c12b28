"""Optional figures for sweeps and batteries (matplotlib, Agg backend)."""
from __future__ import annotations

import numpy as np

__all__ = ["plot_sweep", "plot_battery"]

VERDICT_COLORS = {"pass": "tab:green", "fail": "tab:red", "diagnostic": "tab:gray", "not_applicable": "tab:blue"}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _numeric(values):
    try:
        return np.array([float(v) for v in values])
    except (TypeError, ValueError):
        return None


def plot_sweep(table, path) -> None:
    """Line plot of every numeric column of a sweep against its first column.

    Columns named ``observed``/``predicted`` (or ``ratio_a``/``predicted_a``
    and so on) share an axis so the agreement is visible.
    """
    plt = _pyplot()
    cols = table.columns
    x = _numeric(table.column(cols[0]))
    series = {}
    for c in cols[1:]:
        y = _numeric(table.column(c))
        if y is not None:
            series[c] = y
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, y in series.items():
        style = "--" if name.startswith("predicted") else "-o"
        ax.plot(x, y, style, label=name, ms=4)
    if x is not None and np.all(x > 0) and x.max() / x.min() > 50:
        ax.set_xscale("log")
    ax.set_xlabel(cols[0])
    ax.set_title(table.name)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_battery(reports, path) -> None:
    """Relative slack ``slack / max(|lhs|, |rhs|)`` of every report, grouped by check id."""
    plt = _pyplot()
    flat = [r for rep in reports for r in rep.all_reports()]
    ids = sorted({r.check_id for r in flat})
    pos = {c: i for i, c in enumerate(ids)}
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(ids)), 4))
    for r in flat:
        scale = max(abs(r.lhs), abs(r.rhs), 1e-300)
        ax.errorbar(pos[r.check_id], r.slack / scale, yerr=r.noise_tolerance / scale, fmt="o", ms=3,
                    color=VERDICT_COLORS.get(r.verdict, "k"), alpha=0.6)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xticks(range(len(ids)))
    ax.set_xticklabels(ids, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("relative slack")
    ax.set_yscale("symlog", linthresh=1e-6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
