import functools
from dataclasses import dataclass

import numpy as np

from lindbladcraft.errors import ModelValidationError
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.models.states import InitialState
from lindbladcraft.operators.pauli import PAULI_MATRICES

HBAR_JS = 1.05457e-34
MU_B_ERG_PER_G = 9.27401e-21
ERG_PER_J = 1e7

SINGLET_SHELF = 8
TRIPLET_SHELF = 9
PAIR_LABELS = ("s", "t0", "t+", "t-")
NUCLEAR_LABELS = ("up", "down")


@dataclass(slots=True)
class RpmParameters:
    """Radical-pair parameters: angles in radians, fields in gauss, decay rate in 1/s."""

    theta: float = 0.0
    phi: float = 0.0
    b0: float = 0.47
    hyperfine: tuple[float, float, float] = (0.345, 0.345, 9.0)
    g_factor: float = 2.0
    decay_rate: float = 1e4
    hbar: float = HBAR_JS
    mu_b: float = MU_B_ERG_PER_G

    def __post_init__(self):
        if self.b0 < 0:
            raise ModelValidationError(f"Invalid field strength: {self.b0}")
        if self.decay_rate <= 0:
            raise ModelValidationError(f"Invalid decay rate: {self.decay_rate}")
        if len(self.hyperfine) != 3:
            raise ModelValidationError(f"Hyperfine tensor needs 3 components: {self.hyperfine}")

    @property
    def field(self) -> np.ndarray:
        return self.b0 * np.array(
            [
                np.sin(self.theta) * np.cos(self.phi),
                np.sin(self.theta) * np.sin(self.phi),
                np.cos(self.theta),
            ]
        )

    @property
    def larmor_scale(self) -> float:
        """mu_B / hbar in rad s^-1 G^-1 (CGS)."""
        return self.mu_b / (self.hbar * ERG_PER_J)


def _embed(op, slot: int):
    # product basis: electron 1 (x) electron 2 (x) nucleus
    factors = [np.eye(2, dtype=np.complex128)] * 3
    factors[slot] = op
    return functools.reduce(np.kron, factors)


def pair_basis() -> np.ndarray:
    """Columns: product-basis vectors of |e, n> ordered 2*e + n."""
    up_down = np.array([0, 1, 0, 0], dtype=np.complex128)
    down_up = np.array([0, 0, 1, 0], dtype=np.complex128)
    electrons = [
        (up_down - down_up) / np.sqrt(2),
        (up_down + down_up) / np.sqrt(2),
        np.array([1, 0, 0, 0], dtype=np.complex128),
        np.array([0, 0, 0, 1], dtype=np.complex128),
    ]
    nuclear = [np.array([1, 0], dtype=np.complex128), np.array([0, 1], dtype=np.complex128)]
    return np.column_stack([np.kron(e, n) for e in electrons for n in nuclear])


def rpm_pair_hamiltonian(params: RpmParameters) -> np.ndarray:
    """Eight-dimensional pair Hamiltonian in the {s, t0, t+, t-} x {up, down} basis, in 1/s."""
    paulis = [PAULI_MATRICES[c] for c in "XYZ"]
    field = params.field
    h = np.zeros((8, 8), dtype=np.complex128)
    for component, sigma in enumerate(paulis):
        h += params.g_factor * field[component] * (_embed(sigma, 0) + _embed(sigma, 1))
        h += params.hyperfine[component] * _embed(sigma, 2) @ _embed(sigma, 1)
    h *= params.larmor_scale
    u = pair_basis()
    return u.conj().T @ h @ u


def build_rpm(params: RpmParameters | None = None) -> LindbladModel:
    """
    Radical-pair compass model: eight pair states plus singlet and triplet shelves.

    Jump operators sqrt(k)|S><s,n| for the singlet states and sqrt(k)|T><t,n| for the three
    triplets, in basis order. Time in seconds.
    """
    params = params or RpmParameters()
    dim = 10
    hamiltonian = np.zeros((dim, dim), dtype=np.complex128)
    hamiltonian[:8, :8] = rpm_pair_hamiltonian(params)
    # numerical noise from the basis change
    hamiltonian = 0.5 * (hamiltonian + hamiltonian.conj().T)

    rate = np.sqrt(params.decay_rate)
    jump_ops = []
    for pair_state in range(8):
        shelf = SINGLET_SHELF if pair_state < 2 else TRIPLET_SHELF
        op = np.zeros((dim, dim), dtype=np.complex128)
        op[shelf, pair_state] = rate
        jump_ops.append(op)

    singlet, triplet = np.zeros((dim, dim), dtype=np.complex128), np.zeros((dim, dim), dtype=np.complex128)
    singlet[SINGLET_SHELF, SINGLET_SHELF] = 1.0
    triplet[TRIPLET_SHELF, TRIPLET_SHELF] = 1.0
    basis = tuple(f"{e},{n}" for e in PAIR_LABELS for n in NUCLEAR_LABELS) + ("S", "T")
    return LindbladModel(
        name="rpm",
        hamiltonian=hamiltonian,
        jump_ops=tuple(jump_ops),
        observables={"singlet_yield": singlet, "triplet_yield": triplet},
        time_unit="s",
        unit_note="CGS constants; Pauli spin operators; hyperfine tensor in gauss scaled by mu_B/hbar",
        basis=basis,
    )


def rpm_initial_state() -> InitialState:
    """rho_0 = 1/2 I_nuclear (x) |s><s| as an equal mixture of |s,up> and |s,down>."""
    up, down = np.zeros(10, dtype=np.complex128), np.zeros(10, dtype=np.complex128)
    up[0], down[1] = 1.0, 1.0
    return InitialState(weights=(0.5, 0.5), vectors=(up, down))
