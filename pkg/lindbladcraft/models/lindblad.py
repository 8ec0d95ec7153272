from dataclasses import dataclass, field

import numpy as np

from lindbladcraft.errors import DimensionMismatchError, ModelValidationError
from lindbladcraft.operators.algebra import ComplexMatrix, as_matrix, is_hermitian

HERMITIAN_ATOL = 1e-12


def _frozen(a: ComplexMatrix) -> ComplexMatrix:
    m = np.array(a, dtype=np.complex128, copy=True)
    m.setflags(write=False)
    return m


@dataclass(slots=True, frozen=True, eq=False)
class LindbladModel:
    """
    Hamiltonian plus jump operators of a Lindblad master equation.

    Rates are absorbed into the jump operators (sqrt(gamma_k) L_k). ``observables`` maps
    names to the operators an ensemble records; ``basis`` labels the basis states.
    """

    name: str
    hamiltonian: ComplexMatrix
    jump_ops: tuple[ComplexMatrix, ...] = ()
    observables: dict[str, ComplexMatrix] = field(default_factory=dict)
    time_unit: str = "arb"
    unit_note: str = ""
    basis: tuple[str, ...] = ()

    def __post_init__(self):
        try:
            h = as_matrix(self.hamiltonian, "hamiltonian")
            dim = h.shape[0]
            jumps = tuple(as_matrix(op, f"jump_ops[{k}]") for k, op in enumerate(self.jump_ops))
            observables = {
                name: as_matrix(op, f"observable {name}") for name, op in self.observables.items()
            }
        except DimensionMismatchError as e:
            raise ModelValidationError(str(e)) from e

        if not is_hermitian(h, HERMITIAN_ATOL):
            raise ModelValidationError(f"Hamiltonian of {self.name} is not Hermitian")
        for k, op in enumerate(jumps):
            if op.shape != (dim, dim):
                raise ModelValidationError(
                    f"jump_ops[{k}] has shape {op.shape}, expected {(dim, dim)}"
                )
        for name, op in observables.items():
            if op.shape != (dim, dim):
                raise ModelValidationError(f"Observable {name} has shape {op.shape}")
        if self.basis and len(self.basis) != dim:
            raise ModelValidationError(f"{len(self.basis)} basis labels for dimension {dim}")

        object.__setattr__(self, "hamiltonian", _frozen(h))
        object.__setattr__(self, "jump_ops", tuple(_frozen(op) for op in jumps))
        object.__setattr__(
            self, "observables", {name: _frozen(op) for name, op in observables.items()}
        )

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def n_noise(self) -> int:
        return len(self.jump_ops)

    def observable(self, name: str) -> ComplexMatrix:
        try:
            return self.observables[name]
        except KeyError:
            raise ValueError(
                f"Unknown observable {name!r} for {self.name}; known: {sorted(self.observables)}"
            ) from None

    def select_observables(self, names: list[str] | None) -> dict[str, ComplexMatrix]:
        if names is None:
            return dict(self.observables)
        return {name: self.observable(name) for name in names}


def population_observables(dim: int, labels: list[str]) -> dict[str, ComplexMatrix]:
    """Projectors |i><i| named by the given labels."""
    observables = {}
    for i, label in enumerate(labels):
        projector = np.zeros((dim, dim), dtype=np.complex128)
        projector[i, i] = 1.0
        observables[label] = projector
    return observables
