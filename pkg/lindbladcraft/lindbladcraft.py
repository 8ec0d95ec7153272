import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from lindbladcraft import __version__
from lindbladcraft.config.loader import get_file_config
from lindbladcraft.config.models import RunConfig
from lindbladcraft.ensemble.analysis import (
    ErrorReport,
    WeakOrderEstimate,
    error_vs_exact,
    estimate_weak_order,
    step_count,
)
from lindbladcraft.ensemble.io import estimate_summary, write_meta_json, write_results_csv
from lindbladcraft.ensemble.runner import EnsembleEstimate, run_ensemble, t_halfwidth
from lindbladcraft.errors import ConfigError, GridMismatchError, RunFailureError
from lindbladcraft.integrators.scheme import Method, SchemeConfig
from lindbladcraft.logger import bind_run_context, clear_run_context, get_logger
from lindbladcraft.models.catalog import ModelCatalog, ModelEntry
from lindbladcraft.models.io import load_model_file
from lindbladcraft.models.states import InitialState
from lindbladcraft.operators.algebra import ComplexMatrix
from lindbladcraft.reference.superoperator import (
    ReferenceSeries,
    propagate_exact,
    reference_series,
    steady_state,
)
from lindbladcraft.reporting.plots import (
    plot_angle_yield,
    plot_comparison,
    plot_errors,
    plot_populations,
)
from lindbladcraft.vqs.ansatz import AnsatzCatalog, HvaAnsatz, load_ansatz_file, measured_strings
from lindbladcraft.vqs.trajectory import run_vqs_ensemble

logger = get_logger(__name__)

DEFAULT_ANGLES_DEG = tuple(float(a) for a in range(0, 91, 10))
SINGLET_YIELD = "singlet_yield"


@dataclass(slots=True)
class RunResult:
    estimates: list[EnsembleEstimate]
    errors: dict[str, ErrorReport] = field(default_factory=dict)
    artifacts: list[Path] = field(default_factory=list)


class LindbladCraft:
    """
    Runs the experiments described by one ``RunConfig``.

    Every command writes its artifacts (CSV, meta.json, SVG) under the output directory and
    returns the in-memory results.
    """

    def __init__(self, config_file: str | None = None, config: RunConfig | None = None):
        if config is None:
            if config_file is None:
                raise ConfigError("A config file or a config is required")
            config = get_file_config(config_file)
            if config is None:
                raise ConfigError(f"Config file {config_file} not found")
        self.config = config
        self.entry = self._build_entry(config)
        self.observables = self._select_observables(config)
        logger.info(
            f"Loaded {config.name}: model {self.model.name} (dim {self.model.dim}, "
            f"{self.model.n_noise} jumps), {len(config.schemes)} schemes"
        )

    @property
    def model(self):
        return self.entry.model

    @property
    def initial(self) -> InitialState:
        return self.entry.initial

    @staticmethod
    def _build_entry(config: RunConfig, **overrides) -> ModelEntry:
        spec = config.model
        try:
            if spec.file is not None:
                model, initial = load_model_file(spec.file)
                entry = ModelEntry(model, initial)
            else:
                entry = ModelCatalog.build(spec.name, **{**spec.params, **overrides})
            if spec.initial_index is not None:
                entry = ModelEntry(entry.model, InitialState.basis_state(entry.model.dim, spec.initial_index))
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if config.time_unit is not None and config.time_unit != entry.model.time_unit:
            raise ConfigError(f"Config time unit {config.time_unit} does not match model unit {entry.model.time_unit}")
        return entry

    def _select_observables(self, config: RunConfig) -> dict[str, ComplexMatrix]:
        if config.observables is None:
            return dict(self.model.observables)
        try:
            return self.model.select_observables(config.observables)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def _output_dir(self, out_dir: str | Path | None) -> Path:
        path = Path(out_dir or self.config.outputs.directory)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def _seed(self, seed: int | None) -> int:
        return self.config.ensemble.master_seed if seed is None else seed

    def _workers(self, workers: int | None) -> int | None:
        return self.config.ensemble.workers if workers is None else workers

    def _steps(self, scheme: SchemeConfig) -> tuple[float, int]:
        step = scheme.step_length(self.config.delta)
        try:
            return step, step_count(self.config.t_stop, step)
        except GridMismatchError as e:
            raise ConfigError(f"{scheme.label}: {e}") from e

    def _ensemble(self, scheme: SchemeConfig, seed: int, workers: int | None, entry: ModelEntry | None = None):
        entry = entry or self.entry
        step, n_steps = self._steps(scheme)
        return run_ensemble(
            entry.model,
            entry.initial,
            scheme,
            n_steps,
            self.observables,
            self.config.ensemble.n_traj,
            seed,
            n_repeats=self.config.ensemble.n_repeats,
            delta=step,
            workers=workers,
            executor=self.config.ensemble.executor,
        )

    def _references(self, estimates: list[EnsembleEstimate]) -> dict[float, ReferenceSeries]:
        references: dict[float, ReferenceSeries] = {}
        if not self.observables:
            return references
        rho0 = self.initial.density()
        for estimate in estimates:
            step = float(estimate.times[1] - estimate.times[0])
            key = round(step, 15)
            if key not in references:
                references[key] = reference_series(
                    self.model, rho0, self.observables, step, estimate.times.shape[0] - 1
                )
        return references

    def _reference_for(self, references: dict[float, ReferenceSeries], estimate: EnsembleEstimate):
        return references[round(float(estimate.times[1] - estimate.times[0]), 15)]

    def _errors(
        self, estimates: list[EnsembleEstimate], references: dict[float, ReferenceSeries]
    ) -> dict[str, ErrorReport]:
        if not (self.config.compare_exact and self.observables):
            return {}
        return {
            estimate.title: error_vs_exact(estimate, self._reference_for(references, estimate))
            for estimate in estimates
        }

    def _meta(self, seed: int, estimates: list[EnsembleEstimate], **extra) -> dict:
        return {
            "master_seed": seed,
            "version": __version__,
            "model": self.model.name,
            "time_unit": self.model.time_unit,
            "unit_note": self.model.unit_note,
            "config": self.config.model_dump(mode="json"),
            "runs": [estimate_summary(estimate) for estimate in estimates],
            **extra,
        }

    def _ansatz(self) -> HvaAnsatz:
        spec = self.config.vqs
        if spec.file is not None:
            return load_ansatz_file(spec.file)
        try:
            return AnsatzCatalog(blocks=spec.blocks).build(spec.ansatz, self.model)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def _vqs_estimate(self, scheme: SchemeConfig, seed: int, workers: int | None) -> EnsembleEstimate:
        if scheme.method is Method.EULER_MARUYAMA:
            raise ConfigError("Variational emulation needs a Magnus scheme")
        spec = self.config.vqs
        ansatz = self._ansatz()
        step, n_steps = self._steps(scheme)
        logger.info(f"Variational layer measures {len(measured_strings(self.model))} Pauli strings per step")
        estimate = run_vqs_ensemble(
            self.model,
            self.initial,
            scheme,
            ansatz,
            n_steps,
            self.observables,
            self.config.ensemble.n_traj,
            seed,
            n_repeats=self.config.ensemble.n_repeats,
            delta=step,
            n_substeps=spec.substeps,
            regularization=spec.regularization,
            shots=spec.shots,
            workers=workers,
        )
        return replace(estimate, label=f"VQS {scheme.label}")

    def run(self, out_dir: str | Path | None = None, seed: int | None = None, workers: int | None = None) -> RunResult:
        """Every configured scheme, plus the variational emulation of the first Magnus scheme."""
        out = self._output_dir(out_dir)
        seed, workers = self._seed(seed), self._workers(workers)
        bind_run_context(master_seed=seed, model=self.model.name, command="run")
        try:
            estimates = [self._ensemble(scheme, seed, workers) for scheme in self.config.resolved_schemes()]
            if self.config.vqs is not None:
                magnus = [s for s in self.config.resolved_schemes() if s.method is Method.MAGNUS]
                if not magnus:
                    raise ConfigError("Variational emulation needs a Magnus scheme")
                estimates.append(self._vqs_estimate(magnus[0], seed, workers))
            references = self._references(estimates) if self.config.compare_exact else {}
            errors = self._errors(estimates, references)

            result = RunResult(estimates=estimates, errors=errors)
            meta = self._meta(
                seed,
                estimates,
                errors={
                    label: {name: {"mean": m, "ci": ci} for name, (m, ci) in report.time_averaged.items()}
                    for label, report in errors.items()
                },
            )
            write_meta_json(meta, out / "meta.json")
            result.artifacts.append(out / "meta.json")
            if self.observables:
                write_results_csv(estimates, out / "results.csv")
                result.artifacts.append(out / "results.csv")
                if self.config.outputs.plots:
                    reference = self._reference_for(references, estimates[0]) if references else None
                    result.artifacts.append(
                        plot_populations(estimates, out / "populations.svg", reference, self.model.time_unit)
                    )
                    if errors:
                        result.artifacts.append(plot_errors(errors, out / "errors.svg", self.model.time_unit))
            logger.info(f"Run {self.config.name} finished: {len(result.artifacts)} artifacts in {out}")
            return result
        finally:
            clear_run_context()

    def compare(self, out_dir: str | Path | None = None, seed: int | None = None, workers: int | None = None) -> list[dict]:
        """
        Time-averaged error of every scheme against the exact solver, with 99% CIs over repeats.

        A scheme whose run fails on aborted trajectories stays in the table with no error and
        its ``failure`` message; the comparison fails only when no scheme completes.
        """
        if len(self.config.schemes) < 2:
            raise ConfigError("compare needs at least two schemes")
        if not self.observables:
            raise ConfigError("compare needs at least one observable")
        out = self._output_dir(out_dir)
        seed, workers = self._seed(seed), self._workers(workers)
        bind_run_context(master_seed=seed, model=self.model.name, command="compare")
        try:
            runs: list[tuple[SchemeConfig, EnsembleEstimate | RunFailureError]] = []
            for scheme in self.config.resolved_schemes():
                try:
                    runs.append((scheme, self._ensemble(scheme, seed, workers)))
                except RunFailureError as e:
                    logger.warning(f"{scheme.label} failed: {e}")
                    runs.append((scheme, e))
            estimates = [run for _, run in runs if isinstance(run, EnsembleEstimate)]
            if not estimates:
                raise runs[0][1]
            references = self._references(estimates)
            table = []
            for scheme, run in runs:
                if isinstance(run, RunFailureError):
                    table.append(
                        {
                            "scheme": scheme.label,
                            "error": None,
                            "ci": None,
                            "repeat_errors": np.zeros(0),
                            "aborted_fraction": run.aborted_fraction,
                            "radius_violations": None,
                            "failure": str(run),
                        }
                    )
                    continue
                report = error_vs_exact(run, self._reference_for(references, run))
                combined = report.combined()
                spread = combined.std(ddof=1) if combined.shape[0] > 1 else 0.0
                table.append(
                    {
                        "scheme": run.title,
                        "error": float(combined.mean()),
                        "ci": float(t_halfwidth(np.asarray(spread), combined.shape[0])),
                        "repeat_errors": combined,
                        "aborted_fraction": run.flags.aborted_fraction,
                        "radius_violations": run.flags.radius_violations,
                    }
                )
            write_results_csv(estimates, out / "results.csv")
            write_meta_json(self._meta(seed, estimates, comparison=table), out / "meta.json")
            if self.config.outputs.plots:
                plot_comparison(table, out / "comparison.svg")
            for row in table:
                if row["error"] is None:
                    logger.info(f"{row['scheme']}: aborted ({row['aborted_fraction']:.1%})")
                else:
                    logger.info(f"{row['scheme']}: error {row['error']:.3e} +/- {row['ci']:.1e}")
            return table
        finally:
            clear_run_context()

    def converge(
        self, out_dir: str | Path | None = None, seed: int | None = None, workers: int | None = None
    ) -> dict[str, WeakOrderEstimate]:
        """Weak-order regression of every scheme over ``deltas`` on the first observable."""
        if len(self.config.deltas) < 3:
            raise ConfigError("converge needs at least three step lengths")
        if not self.observables:
            raise ConfigError("converge needs an observable")
        out = self._output_dir(out_dir)
        seed, workers = self._seed(seed), self._workers(workers)
        observable = next(iter(self.observables))
        bind_run_context(master_seed=seed, model=self.model.name, command="converge")
        try:
            report = {}
            for scheme in self.config.resolved_schemes():
                try:
                    report[scheme.label] = estimate_weak_order(
                        self.model,
                        scheme,
                        self.config.deltas,
                        self.config.ensemble.n_traj,
                        observable,
                        self.config.t_stop,
                        self.initial,
                        master_seed=seed,
                        n_repeats=self.config.ensemble.n_repeats,
                        workers=workers,
                    )
                except ValueError as e:
                    raise ConfigError(f"{scheme.label}: {e}") from e
                logger.info(f"{scheme.label}: weak order {report[scheme.label].slope:.2f}")
            write_meta_json(
                {
                    "master_seed": seed,
                    "version": __version__,
                    "observable": observable,
                    "config": self.config.model_dump(mode="json"),
                    "orders": report,
                },
                out / "convergence.json",
            )
            return report
        finally:
            clear_run_context()

    def rpm_yield(
        self, out_dir: str | Path | None = None, seed: int | None = None, workers: int | None = None
    ) -> list[dict]:
        """Final singlet yield against field angle, with the exact yield at t_stop and at steady state."""
        if self.config.model.name != "rpm":
            raise ConfigError("rpm-yield needs the rpm model")
        if SINGLET_YIELD not in self.observables:
            raise ConfigError(f"rpm-yield needs the {SINGLET_YIELD} observable")
        out = self._output_dir(out_dir)
        seed, workers = self._seed(seed), self._workers(workers)
        scheme = self.config.resolved_schemes()[-1]
        angles = self.config.angles_deg or list(DEFAULT_ANGLES_DEG)
        bind_run_context(master_seed=seed, model="rpm", command="rpm-yield")
        try:
            table, estimates = [], []
            for angle in angles:
                entry = self._build_entry(self.config, theta=math.radians(angle))
                estimate = replace(
                    self._ensemble(scheme, seed, workers, entry), label=f"{scheme.label} @ {angle:g} deg"
                )
                estimates.append(estimate)
                singlet = entry.model.observable(SINGLET_YIELD)
                rho0 = entry.initial.density()
                rho_t = propagate_exact(entry.model, rho0, self.config.t_stop)
                stationary = steady_state(entry.model, rho0, 10 * self.config.t_stop)
                final = estimate.observables[SINGLET_YIELD]
                table.append(
                    {
                        "angle_deg": angle,
                        "yield": float(final.mean[-1]),
                        "ci": float(final.ci[-1]),
                        "exact": float(np.trace(rho_t @ singlet).real),
                        "steady_state": float(np.trace(stationary.rho @ singlet).real),
                    }
                )
                logger.info(f"theta={angle:g} deg: singlet yield {table[-1]['yield']:.4f} +/- {table[-1]['ci']:.1e}")
            write_results_csv(estimates, out / "results.csv")
            write_meta_json(self._meta(seed, estimates, angle_yield=table), out / "meta.json")
            if self.config.outputs.plots:
                plot_angle_yield(table, out / "angle_yield.svg")
            return table
        finally:
            clear_run_context()
