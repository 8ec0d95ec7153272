import numpy as np
import pytest

from lindbladcraft.ensemble.analysis import error_vs_exact
from lindbladcraft.ensemble.runner import run_ensemble
from lindbladcraft.integrators.scheme import SchemeConfig
from lindbladcraft.reference.superoperator import reference_series
from lindbladcraft.reporting.plots import (
    plot_angle_yield,
    plot_comparison,
    plot_errors,
    plot_populations,
)


@pytest.fixture
def estimates(tfim, tfim_initial):
    return [
        run_ensemble(tfim, tfim_initial, cfg, 8, dict(tfim.observables), 10, 0, n_repeats=2, delta=0.25, workers=1)
        for cfg in (SchemeConfig(order=1), SchemeConfig(order=2, unraveling="nonlinear"))
    ]


def _is_svg(path) -> bool:
    return path.exists() and "<svg" in path.read_text()


def test_plot_populations(tmp_path, tfim, tfim_initial, estimates):
    reference = reference_series(tfim, tfim_initial.density(), dict(tfim.observables), 0.25, 8)
    path = plot_populations(estimates, tmp_path / "populations.svg", reference, "tJ")
    assert _is_svg(path)


def test_plot_errors(tmp_path, tfim, tfim_initial, estimates):
    reference = reference_series(tfim, tfim_initial.density(), dict(tfim.observables), 0.25, 8)
    reports = {estimate.title: error_vs_exact(estimate, reference) for estimate in estimates}
    assert _is_svg(plot_errors(reports, tmp_path / "errors.svg", "tJ"))


def test_plot_comparison(tmp_path):
    table = [{"scheme": "Scheme I linear", "error": 0.02, "ci": 0.003}, {"scheme": "Scheme II linear", "error": 0.01, "ci": 0.002}]
    assert _is_svg(plot_comparison(table, tmp_path / "nested" / "comparison.svg"))


def test_plot_angle_yield(tmp_path):
    angles = np.arange(0, 91, 30)
    table = [
        {"angle_deg": float(a), "yield": 0.3 + 0.01 * i, "ci": 0.005, "exact": 0.3 + 0.01 * i}
        for i, a in enumerate(angles)
    ]
    assert _is_svg(plot_angle_yield(table, tmp_path / "angle_yield.svg"))


def test_plot_comparison_marks_aborted_runs(tmp_path):
    table = [
        {"scheme": "EM linear", "error": None, "ci": None},
        {"scheme": "Scheme I linear", "error": 0.02, "ci": 0.003},
    ]
    assert _is_svg(plot_comparison(table, tmp_path / "comparison.svg"))
