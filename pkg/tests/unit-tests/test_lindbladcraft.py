import json
import math

import numpy as np
import pytest

from lindbladcraft.config.models import RunConfig
from lindbladcraft.errors import ConfigError, RunFailureError
from lindbladcraft.integrators.scheme import Method
from lindbladcraft.lindbladcraft import LindbladCraft

DAMPING_CONFIG = {
    "name": "damping-small",
    "model": {"name": "damping", "params": {"omega": 0.0, "gamma": 1.0}},
    "schemes": [{"method": "euler_maruyama"}, {"order": 1}],
    "delta": 0.1,
    "t_stop": 0.5,
    "observables": ["excited"],
    "ensemble": {"n_traj": 20, "master_seed": 5, "workers": 1},
    "deltas": [0.1, 0.05, 0.01],
}


def _craft(**overrides) -> LindbladCraft:
    return LindbladCraft(config=RunConfig(**{**DAMPING_CONFIG, **overrides}))


def test_load_config(tmp_path):
    path = tmp_path / "damping.json"
    path.write_text(json.dumps(DAMPING_CONFIG))
    craft = LindbladCraft(config_file=str(path))
    assert craft.config.name == "damping-small"
    assert craft.model.name == "damping"
    assert list(craft.observables) == ["excited"]


@pytest.mark.parametrize(
    "kwargs",
    [{}, {"config_file": "missing.json"}],
)
def test_load_config_missing(kwargs):
    with pytest.raises(ConfigError):
        LindbladCraft(**kwargs)


@pytest.mark.parametrize(
    "overrides",
    [
        {"model": {"name": "unknown"}},
        {"model": {"name": "damping", "params": {"unknown": 1.0}}},
        {"time_unit": "fs"},
        {"observables": ["unknown"]},
    ],
)
def test_invalid_setup(overrides):
    with pytest.raises(ConfigError):
        _craft(**overrides)


def test_initial_index_override():
    craft = _craft(model={"name": "damping", "initial_index": 0})
    np.testing.assert_allclose(craft.initial.density(), [[1, 0], [0, 0]])


class TestRun:
    def test_run_writes_artifacts(self, tmp_path):
        result = _craft().run(out_dir=tmp_path)
        assert [estimate.title for estimate in result.estimates] == ["EM linear", "Scheme I linear"]
        for name in ("meta.json", "results.csv", "populations.svg", "errors.svg"):
            assert (tmp_path / name).is_file()
        assert set(result.errors) == {"EM linear", "Scheme I linear"}

        meta = json.loads((tmp_path / "meta.json").read_text())
        assert meta["master_seed"] == 5
        assert meta["config"]["name"] == "damping-small"
        assert len(meta["runs"]) == 2

    def test_run_damping_magnus_is_exact(self, tmp_path):
        result = _craft(outputs={"directory": str(tmp_path), "plots": False}).run()
        magnus = result.estimates[1]
        np.testing.assert_allclose(magnus.observables["excited"].mean, np.exp(-magnus.times), atol=1e-10)
        assert not (tmp_path / "populations.svg").exists()
        assert (tmp_path / "results.csv").is_file()

    def test_run_seed_override(self, tmp_path):
        craft = _craft()
        first = craft.run(out_dir=tmp_path / "a", seed=9)
        second = craft.run(out_dir=tmp_path / "b", seed=9)
        assert json.loads((tmp_path / "a" / "meta.json").read_text())["master_seed"] == 9
        np.testing.assert_array_equal(
            first.estimates[0].observables["excited"].mean, second.estimates[0].observables["excited"].mean
        )

    def test_run_with_variational_layer(self, tmp_path):
        craft = _craft(
            schemes=[{"order": 1}],
            ensemble={"n_traj": 4, "master_seed": 5, "workers": 1},
            vqs={"ansatz": "model", "blocks": 1},
            outputs={"directory": str(tmp_path), "plots": False},
        )
        result = craft.run()
        assert [estimate.title for estimate in result.estimates] == ["Scheme I linear", "VQS Scheme I linear"]
        np.testing.assert_allclose(
            result.estimates[1].observables["excited"].mean, result.estimates[0].observables["excited"].mean, atol=0.02
        )

    def test_run_variational_layer_needs_magnus(self, tmp_path):
        craft = _craft(schemes=[{"method": "euler_maruyama"}], vqs={"ansatz": "model"})
        with pytest.raises(ConfigError):
            craft.run(out_dir=tmp_path)


class TestCompare:
    def test_compare(self, tmp_path):
        table = _craft().compare(out_dir=tmp_path)
        assert [row["scheme"] for row in table] == ["EM linear", "Scheme I linear"]
        assert table[1]["error"] < 1e-10
        assert table[0]["error"] > table[1]["error"]
        assert (tmp_path / "comparison.svg").is_file()
        assert (tmp_path / "results.csv").is_file()

    def test_compare_needs_two_schemes(self, tmp_path):
        with pytest.raises(ConfigError):
            _craft(schemes=[{"order": 1}]).compare(out_dir=tmp_path)

    def test_compare_keeps_aborted_scheme(self, tmp_path, mocker):
        ensemble = LindbladCraft._ensemble

        def failing_em(craft, scheme, seed, workers):
            if scheme.method is Method.EULER_MARUYAMA:
                raise RunFailureError("5.0% of trajectories aborted with EM linear", aborted_fraction=0.05)
            return ensemble(craft, scheme, seed, workers)

        mocker.patch.object(LindbladCraft, "_ensemble", autospec=True, side_effect=failing_em)
        table = _craft().compare(out_dir=tmp_path)
        assert [row["scheme"] for row in table] == ["EM linear", "Scheme I linear"]
        assert table[0]["error"] is None
        assert table[0]["aborted_fraction"] == pytest.approx(0.05)
        assert "aborted" in table[0]["failure"]
        assert table[1]["error"] < 1e-10
        meta = json.loads((tmp_path / "meta.json").read_text())
        assert meta["comparison"][0]["error"] is None
        assert (tmp_path / "comparison.svg").is_file()

    def test_compare_fails_when_every_scheme_aborts(self, tmp_path, mocker):
        mocker.patch.object(
            LindbladCraft, "_ensemble", side_effect=RunFailureError("all aborted", aborted_fraction=0.5)
        )
        with pytest.raises(RunFailureError):
            _craft().compare(out_dir=tmp_path)


class TestConverge:
    def test_converge(self, tmp_path):
        report = _craft().converge(out_dir=tmp_path)
        assert list(report) == ["EM linear", "Scheme I linear"]
        assert report["EM linear"].slope == pytest.approx(1.0, abs=0.15)
        assert report["Scheme I linear"].below_noise_floor
        assert (tmp_path / "convergence.json").is_file()

    @pytest.mark.parametrize("deltas", [[0.1, 0.05], [0.1, 0.05, 0.025], [0.1, 0.03, 0.01]])
    def test_converge_invalid_deltas(self, tmp_path, deltas):
        with pytest.raises(ConfigError):
            _craft(deltas=deltas).converge(out_dir=tmp_path)


class TestRpmYield:
    def test_rpm_yield(self, tmp_path):
        craft = _craft(
            model={"name": "rpm", "params": {"decay_rate": 1.0e4}},
            schemes=[{"order": 2}],
            delta=1e-7,
            t_stop=1e-6,
            observables=["singlet_yield", "triplet_yield"],
            ensemble={"n_traj": 4, "master_seed": 1, "workers": 1},
            angles_deg=[0.0, 90.0],
            outputs={"directory": str(tmp_path), "plots": True},
        )
        table = craft.rpm_yield()
        assert [row["angle_deg"] for row in table] == [0.0, 90.0]
        for row in table:
            assert 0.0 <= row["exact"] <= 1.0
            assert math.isfinite(row["yield"])
            assert row["steady_state"] >= row["exact"]
        assert (tmp_path / "angle_yield.svg").is_file()

    def test_rpm_yield_needs_rpm_model(self, tmp_path):
        with pytest.raises(ConfigError):
            _craft().rpm_yield(out_dir=tmp_path)
