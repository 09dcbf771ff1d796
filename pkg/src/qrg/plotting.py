"""Figures for experiment reports, written to files with a non-interactive backend."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _ecdf(ax, x, label):
    x = np.sort(np.asarray(x, dtype=float))
    ax.step(x, np.arange(1, x.size + 1) / x.size, where="post", label=label)


def _largest(rep, ax):
    x = np.sort(np.asarray(rep.raw["c_max"], dtype=float)) / np.cbrt(rep.config["n"]) ** 2
    tail = 1.0 - np.arange(1, x.size + 1) / x.size
    ax.loglog(x[:-1], tail[:-1], drawstyle="steps-post", label="empirical tail")
    ax.set_xlabel("largest component / n^(2/3)")
    ax.set_ylabel("P(larger)")


def _walk(rep, ax):
    s = np.asarray(rep.series["s"])
    ax.plot(s, rep.series["mean_zbar"], label="mean rescaled walk")
    ax.plot(s, rep.series["drift"], "--", label="drift a s - lam s^2 / 2c")
    ax.plot(s, rep.series["var_zbar"], ":", label="variance")
    ax.set_xlabel("s")


def _visits(rep, ax):
    n = rep.series["n"]
    ax.semilogx(n, rep.series["median_nu2"], "o-", label="median nu2 / n^(1/3)")
    ax.semilogx(n, rep.series["median_nu1_dev"], "s-", label="median max|nu1 - i| / n^(1/3)")
    ax.set_xlabel("n")


def _dominating(rep, ax):
    for key, vals in rep.raw.items():
        ax.hist(vals, bins=60, histtype="step", density=True, label=key)
    ax.set_xlabel("S* at stopping")


def _excursions(rep, ax):
    _ecdf(ax, rep.raw["c1_scaled"], "largest component / n^(2/3)")
    _ecdf(ax, rep.raw["gamma1"], "longest excursion")
    ax.set_xlabel("size")
    ax.set_ylabel("ECDF")


def _late(rep, ax):
    ax.plot(rep.series["y"], rep.series["p"], "o-", label="p(y)")
    ax.set_xlabel("y")


def _doeblin(rep, ax):
    ax.semilogy(rep.series["n"], np.maximum(rep.series["tv"], 1e-300), "o-", label="TV to stationary law")
    ax.semilogy(rep.series["n"], rep.series["bound"], "--", label="(1 - eps)^n")
    ax.set_xlabel("n")


DRAWERS = {
    "largest": _largest,
    "walk": _walk,
    "visits": _visits,
    "dominating": _dominating,
    "excursions": _excursions,
    "late": _late,
    "doeblin": _doeblin,
}


def render_report(rep, directory) -> list[Path]:
    """Write ``<experiment>.png`` for the report into ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    draw = DRAWERS.get(rep.name)
    if draw is None:
        return []
    fig, ax = plt.subplots(figsize=(6, 4))
    draw(rep, ax)
    ax.set_title(rep.name)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize="small")
    fig.tight_layout()
    target = out / f"{rep.name}.png"
    fig.savefig(target, dpi=100)
    plt.close(fig)
    return [target]


def render_limit_path(path, exc, directory, name: str = "limit") -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    s = path.times
    ax.plot(s, path.w, lw=0.6, label="W")
    ax.plot(s, path.b, lw=0.6, label="B")
    for e in exc.excursions:
        t0 = e.start * path.dt
        ax.axvspan(t0, t0 + e.length, alpha=0.1, color="grey")
    ax.set_xlabel("s")
    ax.legend(fontsize="small")
    fig.tight_layout()
    target = out / f"{name}.png"
    fig.savefig(target, dpi=100)
    plt.close(fig)
    return target
