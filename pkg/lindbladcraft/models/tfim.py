import functools

import numpy as np

from lindbladcraft.models.lindblad import LindbladModel, population_observables
from lindbladcraft.models.states import InitialState
from lindbladcraft.operators.pauli import PAULI_MATRICES

# sigma^- = (sigma_x + i sigma_y) / 2 = |0><1|
LOWERING = np.array([[0, 1], [0, 0]], dtype=np.complex128)


def site_operator(op, site: int, n_sites: int):
    factors = [np.eye(2, dtype=np.complex128)] * n_sites
    factors[site] = op
    return functools.reduce(np.kron, factors)


def build_tfim(n_sites: int, J: float = 1.0, h: float = 1.0, gamma=None) -> LindbladModel:
    """
    Open transverse-field Ising chain with single-site damping.

    H = J sum_i Z_i Z_{i+1} - h sum_i X_i, L_k = sqrt(gamma_k) sigma^-_k. Site 0 is the
    leftmost tensor factor; time in units of tJ.
    """
    if n_sites < 1:
        raise ValueError(f"Invalid number of sites: {n_sites}")
    gamma = [0.1] * n_sites if gamma is None else list(gamma)
    if len(gamma) != n_sites or any(g < 0 for g in gamma):
        raise ValueError(f"Need {n_sites} non-negative damping rates, got {gamma}")

    dim = 2**n_sites
    x, z = PAULI_MATRICES["X"], PAULI_MATRICES["Z"]
    hamiltonian = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(n_sites - 1):
        hamiltonian += J * site_operator(z, i, n_sites) @ site_operator(z, i + 1, n_sites)
    for i in range(n_sites):
        hamiltonian -= h * site_operator(x, i, n_sites)

    jump_ops = tuple(
        np.sqrt(g) * site_operator(LOWERING, k, n_sites) for k, g in enumerate(gamma)
    )
    labels = [format(i, f"0{n_sites}b") for i in range(dim)]
    return LindbladModel(
        name="tfim",
        hamiltonian=hamiltonian,
        jump_ops=jump_ops,
        observables=population_observables(dim, [f"P{b}" for b in labels]),
        time_unit="tJ",
        unit_note="energies in units of J, time in units of 1/J",
        basis=tuple(labels),
    )


def tfim_initial_state(n_sites: int) -> InitialState:
    """All spins in |1>."""
    return InitialState.basis_state(2**n_sites, 2**n_sites - 1)
