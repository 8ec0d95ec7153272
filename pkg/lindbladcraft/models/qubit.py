import numpy as np

from lindbladcraft.models.lindblad import LindbladModel, population_observables
from lindbladcraft.models.states import InitialState
from lindbladcraft.models.tfim import LOWERING
from lindbladcraft.operators.pauli import PAULI_MATRICES


def build_damped_qubit(omega: float = 0.0, gamma: float = 1.0) -> LindbladModel:
    """Two-level system, H = omega/2 X, L = sqrt(gamma) sigma^-; |1> is the excited state."""
    if gamma < 0:
        raise ValueError(f"Invalid damping rate: {gamma}")
    return LindbladModel(
        name="damping",
        hamiltonian=0.5 * omega * PAULI_MATRICES["X"],
        jump_ops=(np.sqrt(gamma) * LOWERING,),
        observables=population_observables(2, ["ground", "excited"]),
        basis=("0", "1"),
    )


def build_dephasing_qubit(omega: float = 0.0, gamma: float = 1.0) -> LindbladModel:
    """Two-level system, H = omega/2 Z, L = sqrt(gamma) Z."""
    if gamma < 0:
        raise ValueError(f"Invalid dephasing rate: {gamma}")
    observables = population_observables(2, ["ground", "excited"])
    observables["coherence_x"] = PAULI_MATRICES["X"]
    return LindbladModel(
        name="dephasing",
        hamiltonian=0.5 * omega * PAULI_MATRICES["Z"],
        jump_ops=(np.sqrt(gamma) * PAULI_MATRICES["Z"],),
        observables=observables,
        basis=("0", "1"),
    )


def excited_state() -> InitialState:
    return InitialState.basis_state(2, 1)


def plus_state() -> InitialState:
    return InitialState.pure(np.array([1.0, 1.0]) / np.sqrt(2))
