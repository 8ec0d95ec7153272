import functools
from dataclasses import dataclass

import numpy as np

from lindbladcraft.errors import NormalizationError
from lindbladcraft.integrators.scheme import Unraveling
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.operators.algebra import (
    ComplexMatrix,
    StateVector,
    adjoint,
    commutator,
    expectation,
    operator_norm,
)

NONLINEAR_NORM_ATOL = 1e-8
COMMUTATOR_RTOL = 1e-12


def vanishes(c: ComplexMatrix, *factors: ComplexMatrix) -> bool:
    """Whether a commutator is zero relative to the norms of its factors."""
    scale = max(1.0, float(np.prod([np.linalg.norm(f) for f in factors])))
    return float(np.linalg.norm(c)) <= COMMUTATOR_RTOL * scale


def ito_drift(model: LindbladModel) -> ComplexMatrix:
    """-i H_eff = -i H - 1/2 sum L^dagger L."""
    g = -1j * model.hamiltonian
    for jump in model.jump_ops:
        g = g - 0.5 * adjoint(jump) @ jump
    return g


def drift_linear(model: LindbladModel) -> ComplexMatrix:
    """Stratonovich drift of the linear unraveling, -i H - 1/2 sum (L + L^dagger) L."""
    g = -1j * model.hamiltonian
    for jump in model.jump_ops:
        g = g - 0.5 * (jump + adjoint(jump)) @ jump
    return g


def drift_nonlinear(model: LindbladModel, psi: StateVector) -> ComplexMatrix:
    """
    Stratonovich drift of the nonlinear unraveling with <L_k> frozen at ``psi``.

    The scalar terms of the conversion only rescale the state and are dropped;
    renormalization after each step absorbs them.
    """
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > NONLINEAR_NORM_ATOL:
        raise NormalizationError(f"Nonlinear drift needs a normalized state, got norm {norm}")
    return _nonlinear_from_linear(generator_set(model), psi)


def _nonlinear_from_linear(generators: "GeneratorSet", psi: StateVector) -> ComplexMatrix:
    g = generators.drift_linear.copy()
    for jump in generators.noise:
        g += 2.0 * expectation(jump, psi).real * jump
    return g


@dataclass(slots=True, frozen=True, eq=False)
class GeneratorSet:
    """
    Drift and noise generators of a model with the commutator structure the schemes need.

    ``fourth_order_structure`` holds when [G_i, G_j] = 0, [[G_m, G_0], G_n] = 0 and
    [[[G_m, G_0], G_0], G_n] = 0 for all noise indices; the reduced Scheme IV is exact then.
    """

    model: LindbladModel
    drift_linear: ComplexMatrix
    drift_ito: ComplexMatrix
    noise: tuple[ComplexMatrix, ...]
    noise_norms: np.ndarray
    noise_commute: bool
    fourth_order_structure: bool

    @property
    def d(self) -> int:
        return len(self.noise)

    def drift(self, unraveling: Unraveling, psi: StateVector | None = None) -> ComplexMatrix:
        if unraveling is Unraveling.LINEAR:
            return self.drift_linear
        if psi is None:
            raise ValueError("The nonlinear drift depends on the current state")
        return _nonlinear_from_linear(self, psi)


def noise_generators_commute(noise: tuple[ComplexMatrix, ...]) -> bool:
    return all(
        vanishes(commutator(noise[i], noise[j]), noise[i], noise[j])
        for i in range(len(noise))
        for j in range(i + 1, len(noise))
    )


def fourth_order_structure(drift: ComplexMatrix, noise: tuple[ComplexMatrix, ...]) -> bool:
    if not noise_generators_commute(noise):
        return False
    for gm in noise:
        inner = commutator(gm, drift)
        outer = commutator(inner, drift)
        for gn in noise:
            if not vanishes(commutator(inner, gn), gm, drift, gn):
                return False
            if not vanishes(commutator(outer, gn), gm, drift, drift, gn):
                return False
    return True


@functools.lru_cache(maxsize=64)
def generator_set(model: LindbladModel) -> GeneratorSet:
    noise = tuple(model.jump_ops)
    g0 = drift_linear(model)
    g0.setflags(write=False)
    return GeneratorSet(
        model=model,
        drift_linear=g0,
        drift_ito=ito_drift(model),
        noise=noise,
        noise_norms=np.array([operator_norm(g) for g in noise]),
        noise_commute=noise_generators_commute(noise),
        fourth_order_structure=fourth_order_structure(g0, noise),
    )
