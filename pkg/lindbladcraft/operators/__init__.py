from lindbladcraft.operators.algebra import (
    ComplexMatrix,
    StateVector,
    adjoint,
    as_matrix,
    as_state,
    commutator,
    expectation,
    is_hermitian,
    is_normalized,
    normalize,
    operator_norm,
    pad_state,
    pad_to_qubits,
    qubit_count,
)
from lindbladcraft.operators.expm import expm_action
from lindbladcraft.operators.pauli import (
    PauliDecomposition,
    measurement_strings,
    pauli_decompose,
    pauli_string_matrix,
)

__all__ = (
    "ComplexMatrix",
    "StateVector",
    "PauliDecomposition",
    "adjoint",
    "as_matrix",
    "as_state",
    "commutator",
    "expectation",
    "expm_action",
    "is_hermitian",
    "is_normalized",
    "measurement_strings",
    "normalize",
    "operator_norm",
    "pad_state",
    "pad_to_qubits",
    "pauli_decompose",
    "pauli_string_matrix",
    "qubit_count",
)
