from dataclasses import dataclass

import numpy as np

from lindbladcraft.errors import DimensionMismatchError, NonFiniteError, SingularMetricError
from lindbladcraft.logger import get_logger
from lindbladcraft.operators.algebra import ComplexMatrix, StateVector
from lindbladcraft.vqs.ansatz import HvaAnsatz

logger = get_logger(__name__)

DEFAULT_REGULARIZATION = 1e-8
PINV_RCOND = 1e-10
PSD_TOLERANCE = 1e-10


@dataclass(slots=True)
class VariationalState:
    """Circuit parameters plus the classical norm Gamma carried next to the normalized circuit state."""

    theta: np.ndarray
    gamma: float
    ansatz: HvaAnsatz

    @classmethod
    def zeros(cls, ansatz: HvaAnsatz) -> "VariationalState":
        return cls(theta=np.zeros(ansatz.n_params), gamma=1.0, ansatz=ansatz)

    def statevector(self) -> StateVector:
        return statevector(self.ansatz, self.theta)


@dataclass(slots=True, frozen=True)
class ShotNoise:
    """Gaussian stand-in for finite-shot estimation of M and V, drawn from ``rng``."""

    shots: int
    rng: np.random.Generator

    def perturb(self, m: np.ndarray, v: np.ndarray, ham_norm: float) -> tuple[np.ndarray, np.ndarray]:
        sigma = 1.0 / np.sqrt(self.shots)
        noise = self.rng.normal(scale=0.25 * sigma, size=m.shape)
        noise = np.triu(noise, 1)
        m_noisy = m + noise + noise.T
        v_noisy = v + self.rng.normal(scale=0.5 * ham_norm * sigma, size=v.shape)
        return m_noisy, v_noisy


def _rotation(theta: float, q: ComplexMatrix) -> ComplexMatrix:
    return np.cos(theta / 2) * np.eye(q.shape[0]) - 1j * np.sin(theta / 2) * q


def _check_params(ansatz: HvaAnsatz, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ansatz.n_params,):
        raise DimensionMismatchError(f"Expected {ansatz.n_params} parameters, got shape {theta.shape}")
    return theta


def statevector(ansatz: HvaAnsatz, theta: np.ndarray) -> StateVector:
    theta = _check_params(ansatz, theta)
    psi = ansatz.reference_state()
    for index, m in ansatz.layout():
        psi = (m if index is None else _rotation(theta[index], m)) @ psi
    return psi


def derivative_states(ansatz: HvaAnsatz, theta: np.ndarray) -> tuple[StateVector, np.ndarray]:
    """
    Circuit state and xi_k = U_after Q_k U_upto_k |ref> for every parameter.

    The derivative with respect to theta_k is -i xi_k / 2. One forward sweep stores the
    partial states, one backward sweep accumulates the trailing unitary.
    """
    theta = _check_params(ansatz, theta)
    layout = ansatz.layout()
    gates = [m if index is None else _rotation(theta[index], m) for index, m in layout]

    partial = [ansatz.reference_state()]
    for gate in gates:
        partial.append(gate @ partial[-1])

    xi = np.empty((ansatz.n_params, ansatz.dim), dtype=np.complex128)
    trailing = np.eye(ansatz.dim, dtype=np.complex128)
    for position in range(len(gates) - 1, -1, -1):
        index, q = layout[position]
        if index is not None:
            xi[index] = trailing @ (q @ partial[position + 1])
        trailing = trailing @ gates[position]
    return partial[-1], xi


def derivative_state(ansatz: HvaAnsatz, theta: np.ndarray, k: int) -> StateVector:
    if not 0 <= k < ansatz.n_params:
        raise ValueError(f"Invalid parameter index: {k}")
    return derivative_states(ansatz, theta)[1][k]


def _metric_terms(
    psi: StateVector, xi: np.ndarray, hamiltonian: ComplexMatrix
) -> tuple[np.ndarray, np.ndarray]:
    if hamiltonian.shape != (psi.shape[0], psi.shape[0]) or xi.shape[1] != psi.shape[0]:
        raise DimensionMismatchError(
            f"Hamiltonian {hamiltonian.shape} does not act on the {psi.shape[0]}-dimensional circuit state"
        )
    m = 0.25 * (xi.conj() @ xi.T).real
    v = 0.5 * (xi.conj() @ (hamiltonian @ psi)).real
    return m, v


def assemble_m_v(
    ansatz: HvaAnsatz, theta: np.ndarray, hamiltonian: ComplexMatrix
) -> tuple[np.ndarray, np.ndarray]:
    """M_ij = Re<xi_i|xi_j> / 4 and V_i = Re<xi_i|H|psi> / 2 at ``theta``."""
    psi, xi = derivative_states(ansatz, theta)
    return _metric_terms(psi, xi, hamiltonian)


def solve_metric(
    m: np.ndarray,
    v: np.ndarray,
    regularization: float = DEFAULT_REGULARIZATION,
    rcond: float = PINV_RCOND,
) -> np.ndarray:
    """
    Least-squares parameter velocity from M theta_dot = V.

    Tikhonov shift, then a pseudo-inverse over eigenvalues above ``rcond`` times the largest.
    """
    eigenvalues, vectors = np.linalg.eigh(m)
    if eigenvalues.size and eigenvalues[0] < -PSD_TOLERANCE:
        raise SingularMetricError(f"Metric is not positive semidefinite: eigenvalue {eigenvalues[0]:.3e}")

    shifted = eigenvalues + regularization
    largest = shifted.max(initial=0.0)
    keep = shifted > rcond * largest if largest > 0 else np.zeros_like(shifted, dtype=bool)
    projected = vectors.T @ v
    if not keep.any():
        if np.linalg.norm(v) > 0:
            raise SingularMetricError("Metric has no usable eigenvalues")
        return np.zeros_like(v)
    dropped = np.count_nonzero(~keep)
    if dropped:
        logger.debug(f"Pseudo-inverse dropped {dropped} metric directions")
    return vectors[:, keep] @ (projected[keep] / shifted[keep])


def velocity(
    ansatz: HvaAnsatz,
    theta: np.ndarray,
    hamiltonian: ComplexMatrix,
    regularization: float = DEFAULT_REGULARIZATION,
    noise: ShotNoise | None = None,
) -> tuple[np.ndarray, float]:
    """Parameter velocity and the log-norm rate Im<psi|H|psi> at ``theta``."""
    psi, xi = derivative_states(ansatz, theta)
    m, v = _metric_terms(psi, xi, hamiltonian)
    if noise is not None:
        m, v = noise.perturb(m, v, float(np.linalg.norm(hamiltonian, 2)))
    rate = float(np.vdot(psi, hamiltonian @ psi).imag)
    return solve_metric(m, v, regularization), rate


def mclachlan_step(
    state: VariationalState,
    hamiltonian: ComplexMatrix,
    dt: float,
    regularization: float = DEFAULT_REGULARIZATION,
    noise: ShotNoise | None = None,
) -> VariationalState:
    """
    Classical RK4 step of theta_dot = M^-1 V under the effective Hamiltonian.

    M and V are re-assembled at every stage. Gamma follows Gamma_dot = Gamma Im<H>, integrated
    with the same stage rates in exponential form.
    """
    if dt <= 0:
        raise ValueError(f"Invalid substep: {dt}")

    def f(theta):
        return velocity(state.ansatz, theta, hamiltonian, regularization, noise)

    k1, r1 = f(state.theta)
    k2, r2 = f(state.theta + 0.5 * dt * k1)
    k3, r3 = f(state.theta + 0.5 * dt * k2)
    k4, r4 = f(state.theta + dt * k3)

    theta = state.theta + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    gamma = state.gamma * np.exp(dt / 6 * (r1 + 2 * r2 + 2 * r3 + r4))
    if not (np.all(np.isfinite(theta)) and np.isfinite(gamma)):
        raise NonFiniteError("Variational step produced non-finite parameters")
    return VariationalState(theta=theta, gamma=float(gamma), ansatz=state.ansatz)
