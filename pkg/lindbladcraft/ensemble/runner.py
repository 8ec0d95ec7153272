import os
from collections.abc import Callable
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Literal

import numpy as np
import scipy.stats

from lindbladcraft.ensemble.trajectory import TrajectoryRecord, run_trajectory
from lindbladcraft.errors import RunFailureError
from lindbladcraft.integrators.scheme import SchemeConfig
from lindbladcraft.integrators.steps import TrajectoryPropagator
from lindbladcraft.logger import get_logger
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.models.states import InitialState
from lindbladcraft.operators.algebra import ComplexMatrix, StateVector
from lindbladcraft.stochastic.increments import truncation_error_bound
from lindbladcraft.stochastic.streams import StreamKey

logger = get_logger(__name__)

CONFIDENCE = 0.99
MAX_ABORTED_FRACTION = 0.01


@dataclass(slots=True, frozen=True)
class ObservableEstimate:
    mean: np.ndarray
    ci: np.ndarray


@dataclass(slots=True, frozen=True)
class RunFlags:
    radius_violations: int = 0
    aborted: int = 0
    aborted_fraction: float = 0.0
    effective_order: int = 1
    omitted_terms: tuple[str, ...] = ()
    truncation_mse_bound: float = 0.0
    diagnostics: tuple[str, ...] = ()


@dataclass(slots=True, frozen=True)
class EnsembleEstimate:
    """
    Observable means over trajectories with 99% confidence half-widths.

    ``repeat_means`` and ``repeat_variances`` hold, per observable, the mean and the
    trajectory variance of every repeat at every step, shape (n_repeats, n_steps + 1).
    """

    times: np.ndarray
    observables: dict[str, ObservableEstimate]
    n_traj: int
    n_repeats: int
    scheme: SchemeConfig
    flags: RunFlags
    master_seed: int
    repeat_means: dict[str, np.ndarray] = field(default_factory=dict)
    repeat_variances: dict[str, np.ndarray] = field(default_factory=dict)
    repeat_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    label: str | None = None

    @property
    def title(self) -> str:
        return self.label or self.scheme.label


def t_halfwidth(std: np.ndarray, n: int, confidence: float = CONFIDENCE) -> np.ndarray:
    """Student-t half-width of the mean of ``n`` samples with standard deviation ``std``."""
    if n < 2:
        return np.zeros_like(std)
    return scipy.stats.t.ppf(0.5 + confidence / 2, n - 1) * std / np.sqrt(n)


def _make_executor(kind: str, workers: int) -> Executor:
    if kind == "process":
        return ProcessPoolExecutor(max_workers=workers)
    return ThreadPoolExecutor(max_workers=workers)


def _run_one(
    key: StreamKey,
    model: LindbladModel,
    initial: StateVector | InitialState,
    cfg: SchemeConfig,
    n_steps: int,
    observables: dict[str, ComplexMatrix],
    propagator: TrajectoryPropagator,
) -> TrajectoryRecord:
    return run_trajectory(model, initial, cfg, n_steps, observables, key, propagator=propagator)


def run_ensemble(
    model: LindbladModel,
    psi0: StateVector | InitialState,
    cfg: SchemeConfig,
    n_steps: int,
    observables: dict[str, ComplexMatrix],
    n_traj: int,
    master_seed: int,
    n_repeats: int = 1,
    delta: float | None = None,
    workers: int | None = None,
    executor: Literal["thread", "process"] = "thread",
    trajectory: Callable[[StreamKey], TrajectoryRecord] | None = None,
) -> EnsembleEstimate:
    """
    Run ``n_repeats`` independent ensembles of ``n_traj`` trajectories.

    Trajectory (r, i) draws from the stream keyed (master_seed, r, i); results are reduced
    in index order, so the estimate does not depend on scheduling or worker count.
    ``trajectory`` replaces the classical propagation of one stream key, e.g. by the
    variational emulator.
    """
    if n_traj < 1 or n_repeats < 1:
        raise ValueError(f"Invalid ensemble size: n_traj={n_traj}, n_repeats={n_repeats}")
    if delta is None and cfg.delta is None:
        raise ValueError("A step length is required")
    propagator = TrajectoryPropagator(model, cfg, delta if delta is not None else cfg.delta)
    step = propagator.delta
    workers = workers or os.cpu_count() or 1
    logger.info(
        f"Running {cfg.label} on {model.name}: {n_repeats} x {n_traj} trajectories, "
        f"{n_steps} steps of {step:g} {model.time_unit}"
    )

    keys = [StreamKey(master_seed, r, i) for r in range(n_repeats) for i in range(n_traj)]
    job = trajectory or partial(
        _run_one,
        model=model,
        initial=psi0,
        cfg=cfg,
        n_steps=n_steps,
        observables=observables,
        propagator=propagator,
    )
    if workers == 1:
        records = [job(key) for key in keys]
    else:
        with _make_executor(executor, workers) as pool:
            records = list(pool.map(job, keys, chunksize=max(1, len(keys) // (4 * workers))))

    aborted = [record for record in records if record.aborted]
    aborted_fraction = len(aborted) / len(records)
    if aborted:
        logger.warning(f"{len(aborted)} of {len(records)} trajectories aborted")
    if aborted_fraction > MAX_ABORTED_FRACTION:
        raise RunFailureError(
            f"{aborted_fraction:.1%} of trajectories aborted with {cfg.label}: {aborted[0].diagnostic}",
            aborted_fraction=aborted_fraction,
        )

    names = list(observables)
    values = np.array([record.values for record in records]).reshape(
        n_repeats, n_traj, len(names), n_steps + 1
    )
    ok = np.array([not record.aborted for record in records]).reshape(n_repeats, n_traj)
    counts = ok.sum(axis=1)
    if not counts.all():
        empty = int(np.flatnonzero(counts == 0)[0])
        raise RunFailureError(
            f"Every trajectory of repeat {empty} aborted with {cfg.label}: {aborted[0].diagnostic}",
            aborted_fraction=aborted_fraction,
        )

    repeat_means, repeat_variances, estimates = {}, {}, {}
    for k, name in enumerate(names):
        means = np.empty((n_repeats, n_steps + 1))
        variances = np.zeros((n_repeats, n_steps + 1))
        for r in range(n_repeats):
            kept = values[r, ok[r], k]
            means[r] = kept.mean(axis=0)
            if kept.shape[0] > 1:
                variances[r] = kept.var(axis=0, ddof=1)
        repeat_means[name], repeat_variances[name] = means, variances

        if n_repeats > 1:
            ci = t_halfwidth(means.std(axis=0, ddof=1), n_repeats)
        else:
            ci = t_halfwidth(np.sqrt(variances[0]), int(counts[0]))
        estimates[name] = ObservableEstimate(mean=means.mean(axis=0), ci=ci)

    flags = RunFlags(
        radius_violations=int(sum(record.radius_violations for record in records)),
        aborted=len(aborted),
        aborted_fraction=aborted_fraction,
        effective_order=propagator.order,
        omitted_terms=propagator.omitted,
        truncation_mse_bound=truncation_error_bound(step, cfg.truncation),
        diagnostics=tuple(record.diagnostic for record in aborted),
    )
    if flags.radius_violations:
        logger.info(f"{flags.radius_violations} steps exceeded the convergence radius proxy")

    return EnsembleEstimate(
        times=step * np.arange(n_steps + 1),
        observables=estimates,
        n_traj=n_traj,
        n_repeats=n_repeats,
        scheme=cfg,
        flags=flags,
        master_seed=master_seed,
        repeat_means=repeat_means,
        repeat_variances=repeat_variances,
        repeat_counts=counts,
    )
