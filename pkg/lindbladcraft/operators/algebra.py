import numpy as np
import numpy.typing as npt

from lindbladcraft.errors import DimensionMismatchError, NonFiniteError

ComplexMatrix = npt.NDArray[np.complex128]
StateVector = npt.NDArray[np.complex128]

NORMALIZED_ATOL = 1e-12


def as_matrix(a, name: str = "matrix") -> ComplexMatrix:
    """Coerce to a finite square complex matrix."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty square matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return m


def as_state(v, name: str = "state") -> StateVector:
    psi = np.asarray(v, dtype=np.complex128)
    if psi.ndim != 1 or psi.shape[0] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty vector, got {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return psi


def adjoint(a: ComplexMatrix) -> ComplexMatrix:
    return a.conj().T


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Cannot commute {a.shape} with {b.shape}")
    return a @ b - b @ a


def is_hermitian(a: ComplexMatrix, atol: float = 1e-12) -> bool:
    return bool(np.allclose(a, adjoint(a), rtol=0.0, atol=atol))


def operator_norm(a: ComplexMatrix) -> float:
    """Spectral norm."""
    return float(np.linalg.norm(a, 2))


def is_normalized(psi: StateVector, atol: float = NORMALIZED_ATOL) -> bool:
    return abs(float(np.linalg.norm(psi)) - 1.0) <= atol


def normalize(psi: StateVector) -> StateVector:
    norm = np.linalg.norm(psi)
    if not np.isfinite(norm) or norm == 0.0:
        raise NonFiniteError(f"Cannot normalize a state of norm {norm}")
    return psi / norm


def expectation(op: ComplexMatrix, psi: StateVector) -> complex:
    """psi^dagger op psi, without normalizing psi."""
    return complex(np.vdot(psi, op @ psi))


def qubit_count(dim: int) -> int:
    return max(1, int(np.ceil(np.log2(dim))))


def pad_to_qubits(a: ComplexMatrix) -> tuple[ComplexMatrix, int]:
    """Zero-pad a square matrix to the next power-of-two dimension."""
    n_qubits = qubit_count(a.shape[0])
    size = 2**n_qubits
    if size == a.shape[0]:
        return a, n_qubits
    padded = np.zeros((size, size), dtype=np.complex128)
    padded[: a.shape[0], : a.shape[1]] = a
    return padded, n_qubits


def pad_state(psi: StateVector, size: int) -> StateVector:
    padded = np.zeros(size, dtype=np.complex128)
    padded[: psi.shape[0]] = psi
    return padded
