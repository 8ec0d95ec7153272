from dataclasses import dataclass, replace

import numpy as np
import scipy.stats

from lindbladcraft.ensemble.runner import CONFIDENCE, EnsembleEstimate, run_ensemble, t_halfwidth
from lindbladcraft.errors import GridMismatchError
from lindbladcraft.integrators.scheme import SchemeConfig
from lindbladcraft.logger import get_logger
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.models.states import InitialState
from lindbladcraft.reference.superoperator import ReferenceSeries, propagate_exact

logger = get_logger(__name__)

NOISE_FLOOR_MIN = 1e-12


@dataclass(slots=True, frozen=True)
class ErrorReport:
    """
    Absolute errors against a reference series.

    ``per_step``: error of the overall mean, per observable and step.
    ``repeat_averaged``: per observable, the step-averaged error of each repeat.
    ``time_averaged``: per observable, (mean, CI half-width) over repeats.
    """

    times: np.ndarray
    per_step: dict[str, np.ndarray]
    repeat_averaged: dict[str, np.ndarray]
    time_averaged: dict[str, tuple[float, float]]

    def combined(self, names: list[str] | None = None) -> np.ndarray:
        """Per-repeat error averaged over the selected observables."""
        names = list(self.repeat_averaged) if names is None else names
        return np.mean([self.repeat_averaged[name] for name in names], axis=0)


@dataclass(slots=True, frozen=True)
class WeakOrderEstimate:
    slope: float
    ci: float
    deltas: np.ndarray
    errors: np.ndarray
    noise_floors: np.ndarray
    inconclusive: bool
    below_noise_floor: bool


def _check_grid(estimate: EnsembleEstimate, reference: ReferenceSeries) -> None:
    if estimate.times.shape != reference.times.shape or not np.allclose(
        estimate.times, reference.times, rtol=1e-9, atol=1e-12 * max(1.0, float(reference.times[-1]))
    ):
        raise GridMismatchError(
            f"Estimate has {estimate.times.shape[0]} time points, reference {reference.times.shape[0]}"
        )
    missing = set(estimate.observables) - set(reference.values)
    if missing:
        raise GridMismatchError(f"Reference lacks observables {sorted(missing)}")


def error_vs_exact(estimate: EnsembleEstimate, reference: ReferenceSeries) -> ErrorReport:
    """Errors averaged over steps within each repeat, then summarized over repeats."""
    _check_grid(estimate, reference)
    per_step, repeat_averaged, time_averaged = {}, {}, {}
    for name, observable in estimate.observables.items():
        exact = reference.values[name]
        per_step[name] = np.abs(observable.mean - exact)
        by_repeat = np.abs(estimate.repeat_means[name] - exact).mean(axis=1)
        repeat_averaged[name] = by_repeat
        spread = by_repeat.std(ddof=1) if by_repeat.shape[0] > 1 else 0.0
        time_averaged[name] = (
            float(by_repeat.mean()),
            float(t_halfwidth(np.asarray(spread), by_repeat.shape[0])),
        )
    return ErrorReport(
        times=estimate.times,
        per_step=per_step,
        repeat_averaged=repeat_averaged,
        time_averaged=time_averaged,
    )


def significantly_less(a, b, confidence: float = CONFIDENCE) -> bool:
    """
    One-sided Welch test that the mean of ``a`` is below the mean of ``b``.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.std() == 0.0 and b.std() == 0.0:
        return bool(a.mean() < b.mean())
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise ValueError("Need at least two repeats per sample")
    result = scipy.stats.ttest_ind(a, b, equal_var=False, alternative="less")
    return bool(result.pvalue < 1.0 - confidence)


def step_count(t_stop: float, delta: float) -> int:
    n_steps = round(t_stop / delta)
    if n_steps < 1 or abs(n_steps * delta - t_stop) > 1e-9 * t_stop:
        raise GridMismatchError(f"t_stop={t_stop} is not a multiple of delta={delta}")
    return n_steps


def estimate_weak_order(
    model: LindbladModel,
    cfg: SchemeConfig,
    deltas: list[float],
    n_traj: int,
    observable: str,
    t_stop: float,
    initial: InitialState,
    master_seed: int = 0,
    n_repeats: int = 1,
    workers: int | None = None,
) -> WeakOrderEstimate:
    """
    Log-log regression of the final-time weak error against the step length.

    Each error is compared with the Monte Carlo half-width at that step length; points at or
    below it make the estimate inconclusive, and all of them flag it as below the noise floor.
    """
    deltas = np.sort(np.asarray(deltas, dtype=float))
    if deltas.shape[0] < 3 or deltas[-1] / deltas[0] < 10.0 * (1 - 1e-9):
        raise ValueError("Need at least three step lengths spanning one decade")

    operator = model.observable(observable)
    rho_t = propagate_exact(model, initial.density(), t_stop)
    exact = float(np.trace(rho_t @ operator).real)

    errors, floors = [], []
    for delta in deltas:
        estimate = run_ensemble(
            model,
            initial,
            replace(cfg, delta=None),
            step_count(t_stop, delta),
            {observable: operator},
            n_traj,
            master_seed,
            n_repeats=n_repeats,
            delta=float(delta),
            workers=workers,
        )
        final = estimate.observables[observable]
        errors.append(abs(float(final.mean[-1]) - exact))
        floors.append(max(float(final.ci[-1]), NOISE_FLOOR_MIN))
    errors, floors = np.array(errors), np.array(floors)

    resolved = errors > floors
    fit = scipy.stats.linregress(np.log(deltas), np.log(np.maximum(errors, 1e-300)))
    ci = float(scipy.stats.t.ppf(0.5 + CONFIDENCE / 2, deltas.shape[0] - 2) * fit.stderr)
    below = not resolved.any()
    inconclusive = not resolved.all()
    if inconclusive:
        logger.warning(f"Weak order of {cfg.label} is limited by sampling noise")
    return WeakOrderEstimate(
        slope=float(fit.slope),
        ci=ci,
        deltas=deltas,
        errors=errors,
        noise_floors=floors,
        inconclusive=inconclusive,
        below_noise_floor=below,
    )
