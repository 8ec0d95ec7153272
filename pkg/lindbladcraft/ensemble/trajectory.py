from dataclasses import dataclass, field

import numpy as np

from lindbladcraft.errors import ConvergenceError, NonFiniteError
from lindbladcraft.integrators.scheme import SchemeConfig
from lindbladcraft.integrators.steps import TrajectoryPropagator
from lindbladcraft.logger import get_logger
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.models.states import InitialState
from lindbladcraft.operators.algebra import ComplexMatrix, StateVector, as_state, is_normalized
from lindbladcraft.stochastic.increments import iter_increments
from lindbladcraft.stochastic.streams import StreamKey, trajectory_streams

logger = get_logger(__name__)


@dataclass(slots=True)
class TrajectoryState:
    """Current state of one trajectory; the weight of a linear trajectory is its squared norm."""

    psi: StateVector
    step: int = 0
    stream_key: StreamKey = field(default_factory=lambda: StreamKey(0))

    @property
    def weight(self) -> float:
        return float(np.vdot(self.psi, self.psi).real)


@dataclass(slots=True, frozen=True)
class TrajectoryRecord:
    """Observable values (n_observables, n_steps + 1); NaN after an abort."""

    values: np.ndarray
    weights: np.ndarray
    radius_violations: int
    stream_key: StreamKey
    aborted: bool = False
    diagnostic: str | None = None


def observable_stack(observables: dict[str, ComplexMatrix], dim: int) -> np.ndarray:
    if not observables:
        return np.zeros((0, dim, dim), dtype=np.complex128)
    return np.array(list(observables.values()), dtype=np.complex128)


def measure(stack: np.ndarray, psi: StateVector) -> np.ndarray:
    """Real parts of psi^dagger O psi for each operator, without normalizing psi."""
    return np.einsum("i,kij,j->k", psi.conj(), stack, psi).real


def _key(stream_key) -> StreamKey:
    return stream_key if isinstance(stream_key, StreamKey) else StreamKey(*stream_key)


def run_trajectory(
    model: LindbladModel,
    psi0: StateVector | InitialState,
    cfg: SchemeConfig,
    n_steps: int,
    observables: dict[str, ComplexMatrix],
    stream_key: StreamKey | tuple[int, ...],
    delta: float | None = None,
    propagator: TrajectoryPropagator | None = None,
) -> TrajectoryRecord:
    """
    Propagate one trajectory and record its observables at every step.

    A mixed initial state is sampled from the trajectory's own stream. Non-finite states end
    the trajectory with a diagnostic instead of raising.
    """
    if n_steps < 1:
        raise ValueError(f"Invalid number of steps: {n_steps}")
    key = _key(stream_key)
    if propagator is None:
        if delta is None and cfg.delta is None:
            raise ValueError("A step length is required")
        propagator = TrajectoryPropagator(model, cfg, delta if delta is not None else cfg.delta)
    streams = trajectory_streams(key)

    psi = psi0.sample(streams.initial) if isinstance(psi0, InitialState) else as_state(psi0, "psi0")
    if not is_normalized(psi, 1e-10):
        raise ValueError("Initial trajectory state must be normalized")

    stack = observable_stack(observables, model.dim)
    values = np.full((stack.shape[0], n_steps + 1), np.nan)
    weights = np.full(n_steps + 1, np.nan)
    values[:, 0] = measure(stack, psi)
    weights[0] = 1.0

    increments = iter_increments(
        n_steps,
        model.n_noise,
        propagator.delta,
        cfg.truncation,
        propagator.increment_order,
        rng=streams.increments,
    )
    state = TrajectoryState(psi=psi, stream_key=key)
    violations = 0
    try:
        for outcome in propagator.iter_outcomes(psi, increments):
            state.psi = outcome.psi
            state.step += 1
            violations += outcome.radius_violation
            values[:, state.step] = measure(stack, state.psi)
            weights[state.step] = state.weight
    except (NonFiniteError, ConvergenceError) as e:
        diagnostic = f"step {state.step + 1}: {e}"
        logger.debug(f"Trajectory {key.as_tuple()} aborted at {diagnostic}")
        return TrajectoryRecord(values, weights, violations, key, aborted=True, diagnostic=diagnostic)

    return TrajectoryRecord(values, weights, violations, key)
