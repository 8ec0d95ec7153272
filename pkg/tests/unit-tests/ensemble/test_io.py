import csv
import json
from enum import StrEnum

import numpy as np
import pytest

from lindbladcraft.ensemble.io import (
    CSV_COLUMNS,
    estimate_summary,
    to_jsonable,
    write_meta_json,
    write_results_csv,
)
from lindbladcraft.ensemble.runner import run_ensemble
from lindbladcraft.integrators.scheme import SchemeConfig


@pytest.fixture
def estimate(damped_qubit, excited):
    return run_ensemble(
        damped_qubit, excited, SchemeConfig(order=2), 4, dict(damped_qubit.observables), 6, 9, n_repeats=2, delta=0.1, workers=1
    )


def test_results_csv_layout(tmp_path, estimate):
    path = tmp_path / "results.csv"
    write_results_csv([estimate], path)
    with open(path) as f:
        rows = list(csv.DictReader(f))
    assert tuple(rows[0]) == CSV_COLUMNS
    # (2 repeats + aggregate) x 5 times x 2 observables
    assert len(rows) == 3 * 5 * 2
    assert {row["repeat"] for row in rows} == {"0", "1", "all"}
    assert {row["scheme"] for row in rows} == {"Scheme II linear"}
    final = [r for r in rows if r["repeat"] == "all" and r["observable"] == "excited" and float(r["time"]) == pytest.approx(0.4)]
    assert float(final[0]["mean"]) == pytest.approx(np.exp(-0.4), abs=1e-12)


def test_to_jsonable():
    class Color(StrEnum):
        RED = "red"

    value = {"a": np.arange(3), 1: (np.float64(0.5), Color.RED), "nan": float("nan")}
    assert to_jsonable(value) == {"a": [0, 1, 2], "1": [0.5, "red"], "nan": None}


def test_meta_json(tmp_path, estimate):
    path = tmp_path / "meta.json"
    write_meta_json({"runs": [estimate_summary(estimate)], "seed": np.int64(9)}, path)
    meta = json.loads(path.read_text())
    run = meta["runs"][0]
    assert meta["seed"] == 9
    assert run["scheme"] == "Scheme II linear"
    assert run["settings"]["unraveling"] == "linear"
    assert run["flags"]["effective_order"] == 2
    assert run["n_repeats"] == 2
