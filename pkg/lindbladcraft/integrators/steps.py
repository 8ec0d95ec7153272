import itertools
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from lindbladcraft.errors import NonFiniteError
from lindbladcraft.integrators.drift import GeneratorSet, drift_nonlinear, generator_set
from lindbladcraft.integrators.magnus import MagnusAssembler, MagnusOperator, resolve_order
from lindbladcraft.integrators.scheme import Method, SchemeConfig
from lindbladcraft.logger import get_logger
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.operators.algebra import StateVector, normalize
from lindbladcraft.operators.expm import DENSE_LIMIT, expm_action
from lindbladcraft.stochastic.increments import STEP_BLOCK, StochasticIncrementSet

logger = get_logger(__name__)


@dataclass(slots=True, frozen=True)
class StepOutcome:
    psi: StateVector
    operator: MagnusOperator | None = None
    radius_violation: bool = False


def _finite(psi: StateVector) -> StateVector:
    if not np.all(np.isfinite(psi)):
        raise NonFiniteError("Step produced non-finite amplitudes")
    return psi


def _assembler(generators: GeneratorSet, cfg: SchemeConfig, drift, order: int) -> MagnusAssembler:
    return MagnusAssembler(
        drift,
        generators.noise,
        order,
        strict_order=cfg.strict_order,
        mixed_modes=cfg.mixed_integral_modes,
        noise_commute=generators.noise_commute,
        structure=generators.fourth_order_structure,
    )


def step_em(psi: StateVector, model: LindbladModel, delta: float, inc: StochasticIncrementSet) -> StateVector:
    """Ito Euler-Maruyama step of the linear unraveling; the result is not normalized."""
    if not np.isclose(inc.delta, delta, rtol=1e-12, atol=0.0):
        raise ValueError(f"Increments sampled for delta={inc.delta}, step uses {delta}")
    generators = generator_set(model)
    psi_next = psi + delta * (generators.drift_ito @ psi)
    for w, jump in zip(inc.w, generators.noise):
        psi_next = psi_next + w * (jump @ psi)
    return _finite(psi_next)


def _flag(cfg: SchemeConfig, operator: MagnusOperator) -> bool:
    violation = cfg.radius_check and operator.radius_violation
    if violation:
        logger.debug(f"Step outside the convergence radius: proxy {operator.radius_proxy:.3f}")
    return violation


def _nonlinear_assembler(
    generators: GeneratorSet, cfg: SchemeConfig, order: int, template: MagnusAssembler | None
) -> MagnusAssembler:
    return template or _assembler(generators, cfg, generators.drift_linear, order)


def step_magnus(
    psi: StateVector,
    model: LindbladModel,
    cfg: SchemeConfig,
    inc: StochasticIncrementSet,
    order: int | None = None,
    template: MagnusAssembler | None = None,
) -> StepOutcome:
    """
    exp(Omega) psi for the configured scheme.

    The nonlinear unraveling renormalizes the result; the linear one keeps the norm as the
    trajectory weight. ``template`` carries precomputed noise commutators of the nonlinear
    unraveling across steps.
    """
    generators = generator_set(model)
    order = cfg.order if order is None else order
    if cfg.is_linear:
        operator = _assembler(generators, cfg, generators.drift_linear, order).omega(inc)
        return StepOutcome(_finite(expm_action(operator.omega, psi)), operator, _flag(cfg, operator))

    template = _nonlinear_assembler(generators, cfg, order, template)
    operator = template.with_drift(drift_nonlinear(model, psi)).omega(inc)
    psi_next = normalize(_finite(expm_action(operator.omega, psi)))
    return StepOutcome(psi_next, operator, _flag(cfg, operator))


def step_rkmk(
    psi: StateVector,
    model: LindbladModel,
    cfg: SchemeConfig,
    inc: StochasticIncrementSet,
    order: int | None = None,
    template: MagnusAssembler | None = None,
) -> StepOutcome:
    """
    Heun-type correction on the Lie algebra: Omega~ = (Omega(psi) + Omega(exp(Omega(psi)) psi)) / 2.

    Both evaluations share the same increments; the predictor is renormalized before <L_k>
    is re-evaluated.
    """
    if cfg.is_linear:
        raise ValueError("RKMK correction requires the nonlinear unraveling")
    generators = generator_set(model)
    order = cfg.order if order is None else order
    template = _nonlinear_assembler(generators, cfg, order, template)

    first = template.with_drift(drift_nonlinear(model, psi)).omega(inc)
    predictor = normalize(_finite(expm_action(first.omega, psi)))
    second = template.with_drift(drift_nonlinear(model, predictor)).omega(inc)

    operator = MagnusOperator(
        omega=0.5 * (first.omega + second.omega),
        order=first.order,
        radius_proxy=max(first.radius_proxy, second.radius_proxy),
        omitted=first.omitted,
    )
    psi_next = normalize(_finite(expm_action(operator.omega, psi)))
    return StepOutcome(psi_next, operator, _flag(cfg, operator))


class TrajectoryPropagator:
    """
    Steps a state through consecutive increments with one scheme.

    Immutable after construction and shared by every trajectory of a run. The linear
    unraveling reuses one set of commutators and exponentiates blocks of steps at once; the
    nonlinear one reuses the noise-only commutators and rebuilds the drift terms per step.
    """

    def __init__(self, model: LindbladModel, cfg: SchemeConfig, delta: float):
        self.model = model
        self.cfg = cfg
        self.delta = cfg.step_length(delta)
        self.generators = generator_set(model)
        self._template: MagnusAssembler | None = None
        if cfg.method is Method.EULER_MARUYAMA:
            self.order = 1
        else:
            self.order = resolve_order(
                cfg.order,
                self.generators.drift_linear,
                self.generators.noise,
                cfg.strict_order,
                self.generators.fourth_order_structure,
            )
            self._template = _assembler(self.generators, cfg, self.generators.drift_linear, self.order)
        self._linear = self._template if cfg.is_linear else None
        self.omitted = self._template.omitted if self._template is not None else ()

    @property
    def increment_order(self) -> int:
        return self.order

    def operator(self, psi: StateVector, inc: StochasticIncrementSet) -> MagnusOperator:
        """Magnus operator of one step from ``psi`` without applying it."""
        if self._template is None:
            raise ValueError("Euler-Maruyama has no Magnus operator")
        if self.cfg.rkmk_correction:
            return step_rkmk(psi, self.model, self.cfg, inc, self.order, self._template).operator
        if self._linear is not None:
            return self._linear.omega(inc)
        return self._template.with_drift(drift_nonlinear(self.model, psi)).omega(inc)

    def step(self, psi: StateVector, inc: StochasticIncrementSet) -> StepOutcome:
        if self._template is None:
            return StepOutcome(step_em(psi, self.model, self.delta, inc))
        if self.cfg.rkmk_correction:
            return step_rkmk(psi, self.model, self.cfg, inc, self.order, self._template)
        if self._linear is not None:
            operator = self._linear.omega(inc)
            return StepOutcome(_finite(expm_action(operator.omega, psi)), operator, _flag(self.cfg, operator))
        return step_magnus(psi, self.model, self.cfg, inc, self.order, self._template)

    def iter_outcomes(
        self, psi0: StateVector, increments: Iterable[StochasticIncrementSet]
    ) -> Iterator[StepOutcome]:
        psi = psi0
        if self._linear is None or self.model.dim > DENSE_LIMIT:
            for inc in increments:
                outcome = self.step(psi, inc)
                psi = outcome.psi
                yield outcome
            return

        for block in itertools.batched(increments, STEP_BLOCK):
            omegas, proxies = self._linear.omega_batch(list(block))
            for propagator, proxy in zip(scipy.linalg.expm(omegas), proxies):
                psi = _finite(propagator @ psi)
                violation = self.cfg.radius_check and proxy >= np.pi
                if violation:
                    logger.debug(f"Step outside the convergence radius: proxy {proxy:.3f}")
                yield StepOutcome(psi, None, bool(violation))
