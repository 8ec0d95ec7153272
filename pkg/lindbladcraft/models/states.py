from dataclasses import dataclass

import numpy as np

from lindbladcraft.errors import DimensionMismatchError, ModelValidationError
from lindbladcraft.operators.algebra import ComplexMatrix, StateVector, as_state, normalize


@dataclass(slots=True, frozen=True, eq=False)
class InitialState:
    """Finite mixture of pure states; a single component is a pure initial state."""

    weights: tuple[float, ...]
    vectors: tuple[StateVector, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.vectors) or not self.vectors:
            raise ModelValidationError("Initial state needs one weight per component")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-10:
            raise ModelValidationError(f"Invalid mixture weights: {self.weights}")
        vectors = tuple(normalize(as_state(v)) for v in self.vectors)
        if len({v.shape for v in vectors}) != 1:
            raise DimensionMismatchError("Mixture components differ in dimension")
        object.__setattr__(self, "vectors", vectors)

    @classmethod
    def pure(cls, psi) -> "InitialState":
        return cls(weights=(1.0,), vectors=(np.asarray(psi, dtype=np.complex128),))

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "InitialState":
        psi = np.zeros(dim, dtype=np.complex128)
        psi[index] = 1.0
        return cls.pure(psi)

    @classmethod
    def from_density(cls, rho: ComplexMatrix, cutoff: float = 1e-12) -> "InitialState":
        eigenvalues, eigenvectors = np.linalg.eigh(rho)
        keep = eigenvalues > cutoff
        weights = eigenvalues[keep] / eigenvalues[keep].sum()
        return cls(
            weights=tuple(float(w) for w in weights),
            vectors=tuple(eigenvectors[:, i] for i in np.flatnonzero(keep)),
        )

    @property
    def dim(self) -> int:
        return self.vectors[0].shape[0]

    @property
    def is_pure(self) -> bool:
        return len(self.vectors) == 1

    def density(self) -> ComplexMatrix:
        rho = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for w, v in zip(self.weights, self.vectors):
            rho += w * np.outer(v, v.conj())
        return rho

    def sample(self, rng: np.random.Generator) -> StateVector:
        if self.is_pure:
            return self.vectors[0].copy()
        index = rng.choice(len(self.vectors), p=np.asarray(self.weights))
        return self.vectors[index].copy()
