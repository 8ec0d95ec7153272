from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from lindbladcraft.ensemble.analysis import ErrorReport  # noqa: E402
from lindbladcraft.ensemble.runner import EnsembleEstimate  # noqa: E402
from lindbladcraft.logger import get_logger  # noqa: E402
from lindbladcraft.reference.superoperator import ReferenceSeries  # noqa: E402

logger = get_logger(__name__)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path


def plot_populations(
    estimates: list[EnsembleEstimate],
    path: str | Path,
    reference: ReferenceSeries | None = None,
    time_unit: str = "",
) -> Path:
    """Ensemble means with 99% CI bands, one panel per scheme, exact curves dashed."""
    fig, axes = plt.subplots(len(estimates), 1, figsize=(7, 3 * len(estimates)), squeeze=False, sharex=True)
    for ax, estimate in zip(axes[:, 0], estimates):
        for name, series in estimate.observables.items():
            (line,) = ax.plot(estimate.times, series.mean, label=name)
            ax.fill_between(
                estimate.times, series.mean - series.ci, series.mean + series.ci, color=line.get_color(), alpha=0.2
            )
            if reference is not None and name in reference.values:
                ax.plot(reference.times, reference.values[name], "--", color=line.get_color(), linewidth=0.8)
        ax.set_title(estimate.title)
        ax.set_ylabel("expectation")
        ax.legend(fontsize="small", ncol=2)
    axes[-1, 0].set_xlabel(f"time [{time_unit}]" if time_unit else "time")
    return _save(fig, path)


def plot_errors(reports: dict[str, ErrorReport], path: str | Path, time_unit: str = "") -> Path:
    """Per-step absolute error averaged over observables, log scale."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, report in reports.items():
        errors = np.mean(list(report.per_step.values()), axis=0)
        ax.plot(report.times, np.maximum(errors, np.finfo(float).tiny), label=label)
    ax.set_yscale("log")
    ax.set_xlabel(f"time [{time_unit}]" if time_unit else "time")
    ax.set_ylabel("absolute error")
    ax.legend(fontsize="small")
    return _save(fig, path)


def plot_comparison(table: list[dict], path: str | Path) -> Path:
    """
    Bar chart of time-averaged errors with CI whiskers; rows carry scheme, error, ci.

    Rows without an error (aborted runs) keep their slot and are marked instead of drawn.
    """
    fig, ax = plt.subplots(figsize=(max(5, 1.2 * len(table)), 4))
    done = [i for i, row in enumerate(table) if row["error"] is not None]
    ax.bar(done, [table[i]["error"] for i in done], yerr=[table[i]["ci"] for i in done], capsize=4)
    for i, row in enumerate(table):
        if row["error"] is None:
            ax.annotate("aborted", (i, 0.02), xycoords=("data", "axes fraction"), ha="center", rotation=90, color="red")
    ax.set_xticks(np.arange(len(table)), [row["scheme"] for row in table], rotation=30, ha="right", fontsize="small")
    ax.set_yscale("log")
    ax.set_ylabel("time-averaged error")
    return _save(fig, path)


def plot_angle_yield(table: list[dict], path: str | Path) -> Path:
    """Singlet yield against field angle; rows carry angle_deg, yield, ci and exact."""
    fig, ax = plt.subplots(figsize=(6, 4))
    angles = np.array([row["angle_deg"] for row in table])
    ax.errorbar(
        angles, [row["yield"] for row in table], yerr=[row["ci"] for row in table], fmt="o", capsize=3, label="ensemble"
    )
    exact = [row.get("exact") for row in table]
    if all(value is not None for value in exact):
        ax.plot(angles, exact, "--", label="exact")
    ax.set_xlabel("angle [deg]")
    ax.set_ylabel("singlet yield")
    ax.legend()
    return _save(fig, path)
