import pytest
from pydantic import ValidationError

from lindbladcraft.config.models import EnsembleSpec, ModelSpec, OutputSpec, RunConfig, VqsSpec
from lindbladcraft.integrators.scheme import SchemeConfig, Unraveling


def _config(**overrides) -> RunConfig:
    values = {"name": "test", "model": {"name": "damping"}, "delta": 0.1, "t_stop": 1.0}
    values.update(overrides)
    return RunConfig(**values)


class TestModelSpec:
    def test_model_spec_by_name(self):
        spec = ModelSpec(name="tfim", params={"n_sites": 2})
        assert spec.name == "tfim"
        assert spec.file is None
        assert spec.params == {"n_sites": 2}
        assert spec.initial_index is None

    def test_model_spec_slots(self):
        spec = ModelSpec(file="model.json")
        with pytest.raises(AttributeError):
            spec.new_attr = "test"

    @pytest.mark.parametrize("kwargs", [{}, {"name": "tfim", "file": "model.json"}])
    def test_model_spec_requires_one_source(self, kwargs):
        with pytest.raises(ValueError):
            ModelSpec(**kwargs)


class TestEnsembleSpec:
    def test_ensemble_spec_defaults(self):
        spec = EnsembleSpec()
        assert spec.n_traj == 1000
        assert spec.n_repeats == 1
        assert spec.master_seed == 0
        assert spec.workers is None
        assert spec.executor == "thread"

    @pytest.mark.parametrize("kwargs", [{"n_traj": 0}, {"n_repeats": 0}, {"master_seed": -1}])
    def test_ensemble_spec_invalid(self, kwargs):
        with pytest.raises(ValueError):
            EnsembleSpec(**kwargs)


def test_output_spec_defaults():
    spec = OutputSpec()
    assert spec.directory == "results"
    assert spec.plots is True


@pytest.mark.parametrize("kwargs", [{"blocks": 0}, {"substeps": 0}, {"regularization": -1.0}, {"shots": 0}])
def test_vqs_spec_invalid(kwargs):
    with pytest.raises(ValueError):
        VqsSpec(**kwargs)


class TestRunConfig:
    def test_run_config_defaults(self):
        config = _config()
        assert config.version == "1.0"
        assert config.schemes == [SchemeConfig()]
        assert config.n_steps == 10
        assert config.truncation is None
        assert config.observables is None
        assert config.compare_exact is True
        assert config.vqs is None
        assert isinstance(config.ensemble, EnsembleSpec)

    def test_run_config_parses_schemes(self):
        config = _config(
            schemes=[
                {"order": 2, "unraveling": "nonlinear", "rkmk_correction": True},
                {"method": "euler_maruyama"},
            ]
        )
        assert config.schemes[0].order == 2
        assert config.schemes[0].unraveling is Unraveling.NONLINEAR
        assert config.schemes[0].rkmk_correction is True
        assert config.schemes[1].label == "EM linear"

    def test_run_config_nested_sections(self):
        config = _config(
            ensemble={"n_traj": 50, "n_repeats": 4, "master_seed": 11},
            outputs={"directory": "out", "plots": False},
            vqs={"ansatz": "model", "blocks": 2},
        )
        assert config.ensemble.n_traj == 50
        assert config.ensemble.master_seed == 11
        assert config.outputs.plots is False
        assert config.vqs.ansatz == "model"
        assert config.vqs.substeps == 10

    def test_run_config_step_count_tolerates_rounding(self):
        assert _config(delta=1e-7, t_stop=5e-5).n_steps == 500

    def test_resolved_schemes_apply_truncation(self):
        config = _config(schemes=[{"order": 1}, {"order": 2}], truncation=40)
        assert [scheme.truncation for scheme in config.resolved_schemes()] == [40, 40]
        assert [scheme.truncation for scheme in config.schemes] == [200, 200]

    @pytest.mark.parametrize(
        "overrides",
        [
            {"t_stop": 1.05},
            {"delta": 0.0},
            {"t_stop": -1.0},
            {"delta": 2.0},
            {"deltas": [0.1, 0.0]},
            {"angles_deg": [0.0, 91.0]},
            {"angles_deg": [-1.0]},
            {"schemes": []},
            {"schemes": [{"order": 5}]},
            {"schemes": [{"method": "euler_maruyama", "unraveling": "nonlinear"}]},
            {"model": {"name": "tfim", "file": "model.json"}},
            {"ensemble": {"n_traj": 0}},
            {"truncation": 0},
            {"time_unit": "ms"},
        ],
    )
    def test_run_config_invalid(self, overrides):
        with pytest.raises(ValidationError):
            _config(**overrides)
