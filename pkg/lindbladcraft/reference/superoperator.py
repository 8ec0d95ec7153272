"""
Exact Lindblad propagation through the vectorized generator.

Vectorization stacks columns: vec(rho) = rho.reshape(-1, order="F"), so that
vec(A rho B) = (B^T kron A) vec(rho).
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from lindbladcraft.errors import NonFiniteError
from lindbladcraft.logger import get_logger
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.operators.algebra import ComplexMatrix, adjoint

logger = get_logger(__name__)

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
POSITIVITY_ATOL = 1e-8


@dataclass(slots=True, frozen=True)
class ReferenceSeries:
    times: np.ndarray
    values: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass(slots=True, frozen=True)
class SteadyState:
    rho: ComplexMatrix
    residual: float
    converged: bool


def vectorize(rho: ComplexMatrix) -> np.ndarray:
    return np.asarray(rho, dtype=np.complex128).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> ComplexMatrix:
    return vec.reshape((dim, dim), order="F")


def build_superoperator(model: LindbladModel) -> ComplexMatrix:
    dim = model.dim
    eye = np.eye(dim, dtype=np.complex128)
    h = model.hamiltonian
    generator = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for jump in model.jump_ops:
        decay = adjoint(jump) @ jump
        generator += (
            np.kron(jump.conj(), jump)
            - 0.5 * np.kron(eye, decay)
            - 0.5 * np.kron(decay.T, eye)
        )
    return generator


def check_density_matrix(rho: ComplexMatrix) -> list[str]:
    """Invariant violations of a density matrix; empty when it is valid."""
    problems = []
    if not np.allclose(rho, adjoint(rho), rtol=0.0, atol=HERMITIAN_ATOL):
        problems.append("not Hermitian")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > TRACE_ATOL:
        problems.append(f"trace {trace.real:.12g} differs from 1")
    min_eigenvalue = float(np.linalg.eigvalsh(0.5 * (rho + adjoint(rho))).min())
    if min_eigenvalue < -POSITIVITY_ATOL:
        problems.append(f"minimum eigenvalue {min_eigenvalue:.3g} is negative")
    return problems


def _finite_density(vec: np.ndarray, dim: int) -> ComplexMatrix:
    if not np.all(np.isfinite(vec)):
        raise NonFiniteError("Exact propagation produced non-finite entries")
    rho = unvectorize(vec, dim)
    problems = check_density_matrix(rho)
    if problems:
        logger.warning(f"Propagated density matrix: {', '.join(problems)}")
    return rho


def propagate_exact(
    model: LindbladModel, rho0: ComplexMatrix, t: float, generator: ComplexMatrix | None = None
) -> ComplexMatrix:
    if t < 0:
        raise ValueError(f"Invalid propagation time: {t}")
    if t == 0:
        return np.array(rho0, dtype=np.complex128)
    generator = build_superoperator(model) if generator is None else generator
    vec = scipy.linalg.expm(generator * t) @ vectorize(rho0)
    return _finite_density(vec, model.dim)


def reference_series(
    model: LindbladModel,
    rho0: ComplexMatrix,
    observables: dict[str, ComplexMatrix],
    delta: float,
    n_steps: int,
) -> ReferenceSeries:
    """Observable traces Tr(rho_n O) on the grid t_n = n * delta, n = 0..n_steps."""
    if delta <= 0 or n_steps < 1:
        raise ValueError(f"Invalid grid: delta={delta}, n_steps={n_steps}")
    dim = model.dim
    step = scipy.linalg.expm(build_superoperator(model) * delta)
    # Tr(rho O) = vec(O^dagger)^dagger vec(rho)
    readout = np.array([vectorize(adjoint(op)).conj() for op in observables.values()])

    vec = vectorize(rho0)
    values = np.empty((len(observables), n_steps + 1))
    values[:, 0] = (readout @ vec).real
    for n in range(1, n_steps + 1):
        vec = step @ vec
        values[:, n] = (readout @ vec).real
    _finite_density(vec, dim)

    times = delta * np.arange(n_steps + 1)
    return ReferenceSeries(times=times, values=dict(zip(observables, values)))


def steady_state(
    model: LindbladModel, rho0: ComplexMatrix, t_stop: float, tol: float = 1e-8
) -> SteadyState:
    """
    Propagate to ``t_stop`` and report the residual |L[rho]|.

    The state counts as converged when the residual is within ``tol`` relative to the
    generator's Frobenius norm (floored at one); an unconverged state is only logged.
    """
    if t_stop <= 0:
        raise ValueError(f"Invalid stopping time: {t_stop}")
    generator = build_superoperator(model)
    rho = propagate_exact(model, rho0, t_stop, generator=generator)
    residual = float(np.linalg.norm(generator @ vectorize(rho)))
    converged = residual <= tol * max(1.0, float(np.linalg.norm(generator)))
    if not converged:
        logger.warning(f"Steady state of {model.name} not reached at t={t_stop}: residual {residual:.3g}")
    return SteadyState(rho=rho, residual=residual, converged=converged)


def write_reference_csv(series: ReferenceSeries, filepath: str | Path) -> None:
    names = list(series.values)
    with open(filepath, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["t", *names])
        for n, t in enumerate(series.times):
            writer.writerow([repr(float(t)), *(repr(float(series.values[name][n])) for name in names)])
