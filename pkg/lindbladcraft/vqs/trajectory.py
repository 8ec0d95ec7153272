from functools import partial

import numpy as np

from lindbladcraft.ensemble.runner import EnsembleEstimate, run_ensemble
from lindbladcraft.ensemble.trajectory import TrajectoryRecord, measure, observable_stack
from lindbladcraft.errors import (
    ConvergenceError,
    DimensionMismatchError,
    NonFiniteError,
    SingularMetricError,
)
from lindbladcraft.integrators.scheme import Method, SchemeConfig
from lindbladcraft.integrators.steps import TrajectoryPropagator
from lindbladcraft.logger import get_logger
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.models.states import InitialState
from lindbladcraft.operators.algebra import ComplexMatrix, StateVector, as_state, pad_to_qubits
from lindbladcraft.stochastic.increments import iter_increments
from lindbladcraft.stochastic.streams import StreamKey, trajectory_streams
from lindbladcraft.vqs.ansatz import HvaAnsatz
from lindbladcraft.vqs.mclachlan import (
    DEFAULT_REGULARIZATION,
    ShotNoise,
    VariationalState,
    mclachlan_step,
)

logger = get_logger(__name__)

DEFAULT_SUBSTEPS = 10
BASIS_ATOL = 1e-10


def _basis_index(psi: StateVector) -> int:
    index = int(np.argmax(np.abs(psi)))
    if abs(abs(psi[index]) - 1.0) > BASIS_ATOL:
        raise ValueError("Variational trajectories start from a computational basis state")
    return index


def _padded_observables(observables: dict[str, ComplexMatrix]) -> dict[str, ComplexMatrix]:
    return {name: pad_to_qubits(op)[0] for name, op in observables.items()}


def _physical(psi: StateVector, dim: int) -> StateVector:
    """Circuit state restricted to the model space, renormalized."""
    head = psi[:dim]
    norm = np.linalg.norm(head)
    if norm < BASIS_ATOL:
        raise NonFiniteError("Circuit state left the model subspace")
    return head / norm


def vqs_trajectory(
    model: LindbladModel,
    psi0: StateVector | InitialState,
    cfg: SchemeConfig,
    ansatz: HvaAnsatz,
    n_steps: int,
    observables: dict[str, ComplexMatrix],
    stream_key: StreamKey | tuple[int, ...],
    delta: float | None = None,
    n_substeps: int = DEFAULT_SUBSTEPS,
    regularization: float = DEFAULT_REGULARIZATION,
    shots: int | None = None,
    propagator: TrajectoryPropagator | None = None,
) -> TrajectoryRecord:
    """
    Emulate one trajectory with a parameterized circuit.

    Each step draws the same increments as the classical trajectory with this stream key,
    builds the Magnus operator Omega at the current circuit state and follows the effective
    Hamiltonian i Omega / delta for ``n_substeps`` McLachlan substeps. The linear unraveling
    reports Gamma^2 <O>; the nonlinear one resets Gamma after every step.
    """
    if cfg.method is Method.EULER_MARUYAMA:
        raise ValueError("Variational trajectories need a Magnus scheme")
    if n_steps < 1 or n_substeps < 1:
        raise ValueError(f"Invalid step counts: n_steps={n_steps}, n_substeps={n_substeps}")
    key = stream_key if isinstance(stream_key, StreamKey) else StreamKey(*stream_key)
    if propagator is None:
        if delta is None and cfg.delta is None:
            raise ValueError("A step length is required")
        propagator = TrajectoryPropagator(model, cfg, delta if delta is not None else cfg.delta)
    step = propagator.delta
    size = pad_to_qubits(model.hamiltonian)[0].shape[0]
    if ansatz.dim != size:
        raise DimensionMismatchError(f"Ansatz acts on {ansatz.dim} amplitudes, model pads to {size}")

    streams = trajectory_streams(key)
    psi = psi0.sample(streams.initial) if isinstance(psi0, InitialState) else as_state(psi0, "psi0")
    ansatz = ansatz.with_reference(_basis_index(psi))
    noise = ShotNoise(shots, streams.shots) if shots else None

    stack = observable_stack(_padded_observables(observables), size)
    values = np.full((stack.shape[0], n_steps + 1), np.nan)
    weights = np.full(n_steps + 1, np.nan)
    state = VariationalState.zeros(ansatz)
    circuit = state.statevector()
    values[:, 0] = measure(stack, circuit)
    weights[0] = 1.0

    increments = iter_increments(
        n_steps, model.n_noise, step, cfg.truncation, propagator.increment_order, rng=streams.increments
    )
    violations = 0
    n = 0
    try:
        for n, inc in enumerate(increments, start=1):
            operator = propagator.operator(_physical(circuit, model.dim), inc)
            violations += cfg.radius_check and operator.radius_violation
            hamiltonian, _ = pad_to_qubits(operator.effective_hamiltonian(step))
            for _ in range(n_substeps):
                state = mclachlan_step(state, hamiltonian, step / n_substeps, regularization, noise)
            if not cfg.is_linear:
                state.gamma = 1.0
            circuit = state.statevector()
            values[:, n] = state.gamma**2 * measure(stack, circuit)
            weights[n] = state.gamma**2
    except (NonFiniteError, ConvergenceError, SingularMetricError) as e:
        diagnostic = f"step {n}: {e}"
        logger.debug(f"Variational trajectory {key.as_tuple()} aborted at {diagnostic}")
        return TrajectoryRecord(values, weights, int(violations), key, aborted=True, diagnostic=diagnostic)

    return TrajectoryRecord(values, weights, int(violations), key)


def run_vqs_ensemble(
    model: LindbladModel,
    psi0: StateVector | InitialState,
    cfg: SchemeConfig,
    ansatz: HvaAnsatz,
    n_steps: int,
    observables: dict[str, ComplexMatrix],
    n_traj: int,
    master_seed: int,
    n_repeats: int = 1,
    delta: float | None = None,
    n_substeps: int = DEFAULT_SUBSTEPS,
    regularization: float = DEFAULT_REGULARIZATION,
    shots: int | None = None,
    workers: int | None = None,
) -> EnsembleEstimate:
    """Ensemble of variational trajectories on the classical run's stream keys."""
    if delta is None and cfg.delta is None:
        raise ValueError("A step length is required")
    propagator = TrajectoryPropagator(model, cfg, delta if delta is not None else cfg.delta)
    logger.info(f"Variational emulation with {ansatz.n_params} parameters, {n_substeps} substeps per step")
    job = partial(
        _vqs_job,
        model=model,
        psi0=psi0,
        cfg=cfg,
        ansatz=ansatz,
        n_steps=n_steps,
        observables=observables,
        n_substeps=n_substeps,
        regularization=regularization,
        shots=shots,
        propagator=propagator,
    )
    return run_ensemble(
        model,
        psi0,
        cfg,
        n_steps,
        observables,
        n_traj,
        master_seed,
        n_repeats=n_repeats,
        delta=propagator.delta,
        workers=workers,
        trajectory=job,
    )


def _vqs_job(key: StreamKey, **kwargs) -> TrajectoryRecord:
    return vqs_trajectory(stream_key=key, **kwargs)
