import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from lindbladcraft.errors import DimensionMismatchError
from lindbladcraft.operators.algebra import ComplexMatrix, pad_to_qubits

DROP_THRESHOLD = 1e-12

PAULI_MATRICES = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def is_pauli_label(label: str, n_qubits: int | None = None) -> bool:
    if not label or any(c not in PAULI_MATRICES for c in label):
        return False
    return n_qubits is None or len(label) == n_qubits


@functools.lru_cache(maxsize=4096)
def _cached_string(label: str) -> ComplexMatrix:
    m = functools.reduce(np.kron, (PAULI_MATRICES[c] for c in label), np.eye(1, dtype=np.complex128))
    m.setflags(write=False)
    return m


def pauli_string_matrix(label: str) -> ComplexMatrix:
    """
    Dense matrix of a Pauli string; the leftmost character acts on the first qubit.

    The empty string is the identity on zero qubits, a 1 x 1 matrix.
    """
    if label and not is_pauli_label(label):
        raise ValueError(f"Invalid Pauli string: {label!r}")
    return _cached_string(label)


@dataclass(slots=True, frozen=True)
class PauliDecomposition:
    n_qubits: int
    terms: dict[str, complex] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.terms)

    def to_matrix(self) -> ComplexMatrix:
        size = 2**self.n_qubits
        m = np.zeros((size, size), dtype=np.complex128)
        for label, coefficient in self.terms.items():
            m += coefficient * pauli_string_matrix(label)
        return m


def pauli_decompose(m: ComplexMatrix, drop_threshold: float = DROP_THRESHOLD) -> PauliDecomposition:
    """
    Trace projection of a 2^n x 2^n matrix onto the n-qubit Pauli strings.

    A 1 x 1 matrix decomposes onto the single empty string.
    """
    dim = m.shape[0] if m.ndim == 2 else 0
    if dim < 1 or m.shape[1] != dim or dim & (dim - 1):
        raise DimensionMismatchError(
            f"Pauli decomposition needs a 2^n x 2^n matrix, got {m.shape}; pad it first"
        )
    n_qubits = dim.bit_length() - 1

    terms = {}
    flat = m.ravel()
    for letters in itertools.product("IXYZ", repeat=n_qubits):
        label = "".join(letters)
        coefficient = complex(np.vdot(pauli_string_matrix(label).ravel(), flat)) / dim
        if abs(coefficient) >= drop_threshold:
            terms[label] = coefficient
    return PauliDecomposition(n_qubits=n_qubits, terms=terms)


def measurement_strings(
    matrices, drop_threshold: float = DROP_THRESHOLD
) -> frozenset[str]:
    """Union of non-negligible Pauli strings across (zero-padded) operators."""
    labels: set[str] = set()
    for m in matrices:
        padded, _ = pad_to_qubits(m)
        labels.update(pauli_decompose(padded, drop_threshold).terms)
    return frozenset(labels)
