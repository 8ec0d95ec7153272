import numpy as np
import pytest

from lindbladcraft.ensemble.runner import run_ensemble
from lindbladcraft.ensemble.trajectory import run_trajectory
from lindbladcraft.errors import DimensionMismatchError
from lindbladcraft.integrators.scheme import SchemeConfig
from lindbladcraft.models.qubit import plus_state
from lindbladcraft.vqs.ansatz import hva_from_model, tfim_ansatz
from lindbladcraft.vqs.trajectory import run_vqs_ensemble, vqs_trajectory


@pytest.fixture
def ansatz(damped_qubit):
    return hva_from_model(damped_qubit, blocks=1)


def test_vqs_trajectory_follows_classical_path(damped_qubit, excited, ansatz):
    cfg = SchemeConfig(order=1)
    for i in range(4):
        key = (11, 0, i)
        classical = run_trajectory(damped_qubit, excited, cfg, 10, damped_qubit.observables, key, delta=0.1)
        emulated = vqs_trajectory(damped_qubit, excited, cfg, ansatz, 10, damped_qubit.observables, key, delta=0.1)
        assert not emulated.aborted
        assert emulated.values.shape == classical.values.shape
        np.testing.assert_allclose(emulated.values, classical.values, atol=0.02)
        np.testing.assert_allclose(emulated.weights, classical.weights, rtol=0.02)


def test_vqs_trajectory_nonlinear_stays_normalized(damped_qubit, excited, ansatz):
    cfg = SchemeConfig(order=2, unraveling="nonlinear")
    record = vqs_trajectory(damped_qubit, excited, cfg, ansatz, 5, damped_qubit.observables, (5, 0, 0), delta=0.1)
    np.testing.assert_allclose(record.weights, 1.0)
    np.testing.assert_allclose(record.values.sum(axis=0), 1.0, atol=1e-10)


@pytest.mark.parametrize(
    "cfg, ansatz_factory, initial, error",
    [
        (SchemeConfig(method="euler_maruyama"), None, None, ValueError),
        (SchemeConfig(), tfim_ansatz, None, DimensionMismatchError),
        (SchemeConfig(), None, plus_state(), ValueError),
    ],
)
def test_vqs_trajectory_rejects(damped_qubit, excited, ansatz, cfg, ansatz_factory, initial, error):
    with pytest.raises(error):
        vqs_trajectory(
            damped_qubit,
            initial or excited,
            cfg,
            ansatz_factory() if ansatz_factory else ansatz,
            3,
            damped_qubit.observables,
            (0, 0, 0),
            delta=0.1,
        )


def test_vqs_trajectory_requires_step(damped_qubit, excited, ansatz):
    with pytest.raises(ValueError):
        vqs_trajectory(damped_qubit, excited, SchemeConfig(), ansatz, 3, damped_qubit.observables, (0, 0, 0))


class TestVqsEnsemble:
    def test_matches_classical_ensemble(self, damped_qubit, excited, ansatz):
        kwargs = {"n_traj": 6, "master_seed": 3, "delta": 0.1, "workers": 1}
        cfg = SchemeConfig(order=1)
        emulated = run_vqs_ensemble(damped_qubit, excited, cfg, ansatz, 5, damped_qubit.observables, **kwargs)
        classical = run_ensemble(damped_qubit, excited, cfg, 5, damped_qubit.observables, **kwargs)
        np.testing.assert_allclose(emulated.times, classical.times)
        for name in damped_qubit.observables:
            assert np.all(np.isfinite(emulated.observables[name].mean))
            np.testing.assert_allclose(
                emulated.observables[name].mean, classical.observables[name].mean, atol=0.02
            )

    def test_shot_noise_is_reproducible(self, damped_qubit, excited, ansatz):
        kwargs = {"n_traj": 3, "master_seed": 9, "delta": 0.1, "workers": 2, "shots": 10_000}
        cfg = SchemeConfig(order=1)
        first = run_vqs_ensemble(damped_qubit, excited, cfg, ansatz, 4, damped_qubit.observables, **kwargs)
        second = run_vqs_ensemble(damped_qubit, excited, cfg, ansatz, 4, damped_qubit.observables, **kwargs)
        for name in damped_qubit.observables:
            np.testing.assert_array_equal(first.observables[name].mean, second.observables[name].mean)
