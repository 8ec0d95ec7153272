import csv
import json
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from lindbladcraft.ensemble.runner import EnsembleEstimate, t_halfwidth

CSV_COLUMNS = ("scheme", "repeat", "time", "observable", "mean", "ci_halfwidth")


def estimate_rows(estimate: EnsembleEstimate):
    """Long-format rows: one per repeat and an aggregate row with repeat 'all'."""
    label = estimate.title
    for name, observable in estimate.observables.items():
        for r in range(estimate.n_repeats):
            ci = t_halfwidth(
                np.sqrt(estimate.repeat_variances[name][r]), int(estimate.repeat_counts[r])
            )
            for n, t in enumerate(estimate.times):
                yield label, r, float(t), name, float(estimate.repeat_means[name][r, n]), float(ci[n])
        for n, t in enumerate(estimate.times):
            yield label, "all", float(t), name, float(observable.mean[n]), float(observable.ci[n])


def write_results_csv(estimates: list[EnsembleEstimate], filepath: str | Path) -> None:
    with open(filepath, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for estimate in estimates:
            writer.writerows(estimate_rows(estimate))


def to_jsonable(value):
    if is_dataclass(value) and not isinstance(value, type):
        return {k: to_jsonable(v) for k, v in asdict(value).items()}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_meta_json(meta: dict, filepath: str | Path) -> None:
    with open(filepath, "w") as f:
        json.dump(to_jsonable(meta), f, indent=2)


def estimate_summary(estimate: EnsembleEstimate) -> dict:
    return {
        "scheme": estimate.title,
        "settings": estimate.scheme,
        "n_traj": estimate.n_traj,
        "n_repeats": estimate.n_repeats,
        "flags": estimate.flags,
    }
