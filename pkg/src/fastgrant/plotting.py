"""Figures for experiment outputs, written next to the CSV files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.figsize": (4.6, 3.2),
    "savefig.dpi": 150,
}

LABELS = {
    "oma-mab": "OMA (MAB)",
    "noma-mab": "NOMA (MAB)",
    "noma-mab-ms": "NOMA, mode switch ON",
    "noma-mab-nms": "NOMA, mode switch OFF",
    "best-oma": "Best (OMA)",
    "qo-best": "Quasi-optimal, best CHs",
    "qo-mab": "Quasi-optimal, MAB CHs",
}

YLABELS = {
    "reward": "cumulative reward",
    "regret": "cumulative regret",
    "waste": "cumulative wasted RBs",
}


def _series(summary, metric):
    return {"reward": summary.cumulative_reward, "regret": summary.cumulative_regret,
            "waste": summary.cumulative_waste}[metric]


def new_figure():
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
    return fig, ax


def save(fig, path):
    with plt.rc_context(STYLE):
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_curves(summaries: dict, metric: str, path, labels=None):
    """Cumulative ``metric`` against cycle, one line per entry of ``summaries``."""
    labels = labels or {}
    fig, ax = new_figure()
    for key, s in summaries.items():
        y = _series(s, metric)
        ax.plot(np.arange(1, len(y) + 1), y, label=labels.get(key, LABELS.get(key, key)), lw=1.2)
    ax.set_xlabel("cycle")
    ax.set_ylabel(YLABELS[metric])
    ax.legend(loc="best")
    return save(fig, path)


def plot_histogram(summaries: dict, strict_mask, path):
    fig, ax = new_figure()
    n = len(strict_mask)
    ids = np.arange(n)
    for key, s in summaries.items():
        ax.step(ids, s.histogram, where="mid", lw=0.8, label=LABELS.get(key, key))
    n_strict = int(np.sum(strict_mask))
    ax.axvline(n_strict - 0.5, color="k", ls=":", lw=0.8)
    ax.set_xlabel("device id (strict | relaxed)")
    ax.set_ylabel("times scheduled")
    ax.legend(loc="upper right")
    return save(fig, path)


def plot_experiment(outdir, exp, result_or_sweep) -> list:
    """Render every figure registered for ``exp``; returns the written paths."""
    written = []
    if exp.sweep:
        merged, labels = {}, {}
        for err, res in result_or_sweep.items():
            for v, s in res.summaries.items():
                key = f"{v}@{err:g}"
                merged[key] = s
                labels[key] = f"{LABELS.get(v, v)}, mean error {err:g}"
        for metric in exp.figures:
            written.append(plot_curves(merged, metric, outdir / f"{metric}_vs_prediction_error.png", labels))
        return written
    res = result_or_sweep
    for fig in exp.figures:
        if fig == "histogram":
            written.append(plot_histogram(res.summaries, res.strict_mask, outdir / "histogram.png"))
        else:
            written.append(plot_curves(res.summaries, fig, outdir / f"{fig}.png"))
    return written
