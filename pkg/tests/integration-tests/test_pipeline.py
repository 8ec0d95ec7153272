import csv
import json

import numpy as np
import pytest

from lindbladcraft.config.loader import get_file_config, get_preset_config
from lindbladcraft.config.models import EnsembleSpec, OutputSpec, RunConfig
from lindbladcraft.lindbladcraft import LindbladCraft

DECAYING_QUBIT = {
    "name": "decaying-qubit",
    "dim": 2,
    "hamiltonian": {"real": [[0.0, 0.0], [0.0, 0.0]]},
    "jump_ops": [{"real": [[0.0, 1.0], [0.0, 0.0]]}],
    "initial_index": 1,
}


def _rows(path, **match):
    with open(path) as f:
        return [row for row in csv.DictReader(f) if all(row[k] == v for k, v in match.items())]


def test_model_file_pipeline(tmp_path):
    model_path = tmp_path / "qubit.json"
    model_path.write_text(json.dumps(DECAYING_QUBIT))
    config_path = tmp_path / "run.json"
    config_path.write_text(
        json.dumps(
            {
                "name": "file-model",
                "model": {"file": str(model_path)},
                "schemes": [{"order": 1}, {"order": 3}, {"order": 2, "unraveling": "nonlinear", "rkmk_correction": True}],
                "delta": 0.05,
                "t_stop": 1.0,
                "ensemble": {"n_traj": 25, "n_repeats": 2, "master_seed": 8, "workers": 2},
                "outputs": {"directory": str(tmp_path / "out"), "plots": True},
            }
        )
    )
    result = LindbladCraft(config_file=str(config_path)).run()

    out = tmp_path / "out"
    for name in ("meta.json", "results.csv", "populations.svg", "errors.svg"):
        assert (out / name).is_file()
    for label in ("Scheme I linear", "Scheme III linear"):
        final = _rows(out / "results.csv", scheme=label, repeat="all", observable="P1")[-1]
        assert float(final["time"]) == pytest.approx(1.0)
        assert float(final["mean"]) == pytest.approx(np.exp(-1.0), abs=1e-10)
    mean, _ = result.errors["Scheme I linear"].time_averaged["P1"]
    assert mean < 1e-10


def test_preset_pipeline_is_reproducible_across_workers(tmp_path):
    base = get_preset_config("tfim")
    results = []
    for workers in (1, 4):
        config = base.model_copy(
            update={
                "t_stop": 1.0,
                "ensemble": EnsembleSpec(n_traj=8, n_repeats=2, master_seed=3, workers=workers),
                "outputs": OutputSpec(directory=str(tmp_path / f"w{workers}"), plots=False),
            }
        )
        craft = LindbladCraft(config=config)
        results.append(craft.compare())
    assert [row["scheme"] for row in results[0]] == [
        "Scheme I linear",
        "Scheme II linear",
        "Scheme I nonlinear",
        "Scheme II nonlinear",
    ]
    for a, b in zip(*results):
        assert a["error"] == b["error"]
    assert (tmp_path / "w1" / "results.csv").read_text() == (tmp_path / "w4" / "results.csv").read_text()
    # 4 schemes x (2 repeats + aggregate) x 5 times x 3 observables
    assert len(_rows(tmp_path / "w1" / "results.csv")) == 4 * 3 * 5 * 3


def test_config_round_trip(tmp_path):
    config = get_preset_config("fmo")
    path = tmp_path / "fmo.json"
    path.write_text(config.model_dump_json())
    reloaded = get_file_config(path)
    assert isinstance(reloaded, RunConfig)
    assert reloaded.resolved_schemes() == config.resolved_schemes()
    assert reloaded.n_steps == 100
