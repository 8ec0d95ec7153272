"""
Acceptance-scale statistical runs. Slow: enable with ``pytest --run-slow``.
"""

import numpy as np
import pytest

from lindbladcraft.config.loader import get_preset_config
from lindbladcraft.config.models import OutputSpec
from lindbladcraft.ensemble.analysis import significantly_less
from lindbladcraft.ensemble.runner import run_ensemble
from lindbladcraft.ensemble.trajectory import run_trajectory
from lindbladcraft.integrators.scheme import SchemeConfig
from lindbladcraft.lindbladcraft import LindbladCraft
from lindbladcraft.models.qubit import build_dephasing_qubit, plus_state
from lindbladcraft.models.tfim import build_tfim, tfim_initial_state
from lindbladcraft.reference.superoperator import reference_series
from lindbladcraft.vqs.ansatz import tfim_ansatz
from lindbladcraft.vqs.trajectory import vqs_trajectory

pytestmark = pytest.mark.slow


def _craft(preset: str, tmp_path, **updates) -> LindbladCraft:
    config = get_preset_config(preset)
    outputs = OutputSpec(directory=str(tmp_path / preset), plots=False)
    return LindbladCraft(config=config.model_copy(update={"outputs": outputs, **updates}))


def _by_scheme(table: list[dict]) -> dict[str, np.ndarray]:
    return {row["scheme"]: row["repeat_errors"] for row in table}


def test_tfim_second_order_beats_first(tmp_path):
    errors = _by_scheme(_craft("tfim", tmp_path).compare())
    for unraveling in ("linear", "nonlinear"):
        assert significantly_less(errors[f"Scheme II {unraveling}"], errors[f"Scheme I {unraveling}"])
    for scheme in ("I", "II"):
        assert significantly_less(errors[f"Scheme {scheme} nonlinear"], errors[f"Scheme {scheme} linear"])


def test_fmo_nonlinear_beats_linear(tmp_path):
    craft = _craft("fmo", tmp_path)
    errors = _by_scheme(craft.compare())
    assert significantly_less(errors["Scheme I nonlinear"], errors["Scheme I linear"])
    # the correction never makes the nonlinear run worse
    assert not significantly_less(errors["Scheme I nonlinear"], errors["Scheme I nonlinear rkmk"])


def test_euler_maruyama_lags_magnus_on_tfim(tmp_path):
    table = {row["scheme"]: row for row in _craft("tfim-em", tmp_path).compare()}
    magnus = table["Scheme I linear"]
    coarse = table["EM linear @ 0.25"]
    if coarse["error"] is None:
        assert coarse["aborted_fraction"] > 0.01
    else:
        assert coarse["error"] >= 10 * magnus["error"]
    fine = table["EM linear @ 0.0025"]
    assert fine["error"] is not None
    assert significantly_less(magnus["repeat_errors"], fine["repeat_errors"])


@pytest.mark.parametrize("cfg", [SchemeConfig(method="euler_maruyama"), SchemeConfig(order=1)], ids=["ito", "stratonovich"])
def test_small_step_limit_matches_exact(cfg):
    model = build_dephasing_qubit(omega=1.0, gamma=1.0)
    initial = plus_state()
    observables = model.select_observables(["excited"])
    n_traj, n_steps, delta = 10_000, 250, 1e-3
    reference = reference_series(model, initial.density(), observables, delta, n_steps)
    estimate = run_ensemble(model, initial, cfg, n_steps, observables, n_traj, 11, delta=delta)
    mean = estimate.observables["excited"].mean
    standard_error = np.sqrt(estimate.repeat_variances["excited"][0] / n_traj)
    for n in (50, 125, 250):
        assert abs(mean[n] - reference.values["excited"][n]) <= 3 * standard_error[n], n


def test_euler_maruyama_weak_order(tmp_path):
    craft = _craft("damping", tmp_path)
    report = craft.converge()
    em = report["EM linear"]
    assert not em.below_noise_floor
    assert em.slope == pytest.approx(1.0, abs=0.2)


def test_vqs_follows_classical_tfim_trajectory():
    model = build_tfim(2, gamma=[0.1, 0.1])
    initial = tfim_initial_state(2)
    observables = model.select_observables(["P00", "P01", "P10", "P11"])
    cfg = SchemeConfig(order=1)
    for key in ((2024, 0, 0), (2024, 0, 1)):
        classical = run_trajectory(model, initial, cfg, 100, observables, key, delta=0.25)
        emulated = vqs_trajectory(model, initial, cfg, tfim_ansatz(3), 100, observables, key, delta=0.25)
        assert not emulated.aborted
        assert np.max(np.abs(emulated.values - classical.values)) <= 1e-2


def test_rpm_yield_matches_exact(tmp_path):
    craft = _craft("rpm", tmp_path, angles_deg=[0.0, 90.0])
    for row in craft.rpm_yield():
        assert abs(row["yield"] - row["exact"]) <= 3 * row["ci"] + 1e-3, row["angle_deg"]
