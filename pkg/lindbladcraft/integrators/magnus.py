"""
Stochastic Magnus operators of Schemes I-IV.

Every scheme is a linear combination of fixed (nested) commutators of the generators with
per-step random coefficients. ``MagnusAssembler`` precomputes the commutators once for a
given drift and turns each ``StochasticIncrementSet`` into a coefficient vector. The nonlinear
unraveling changes the drift every step; ``with_drift`` keeps the noise-only commutators.
"""

import copy
from dataclasses import dataclass, field

import numpy as np

from lindbladcraft.errors import SchemeStructureError
from lindbladcraft.integrators.drift import (
    fourth_order_structure,
    noise_generators_commute,
    vanishes,
)
from lindbladcraft.logger import get_logger
from lindbladcraft.operators.algebra import ComplexMatrix, commutator, operator_norm
from lindbladcraft.stochastic.fourier_path import (
    DEFAULT_MODES,
    drift_noise_triple_integrals,
    fourier_path_increments,
)
from lindbladcraft.stochastic.increments import StochasticIncrementSet

logger = get_logger(__name__)

RADIUS_LIMIT = np.pi
MIXED_TRIPLE = "scheme3-mixed-triple"
GROUPS = (
    "drift_noise", "levy", "double_drift", "mixed_drift_noise",
    "mixed_levy_drift", "mixed_levy_noise", "fourth",
)
# terms built from the noise generators alone
NOISE_GROUPS = ("levy", "mixed_levy_noise")


@dataclass(slots=True, frozen=True)
class MagnusOperator:
    omega: ComplexMatrix
    order: int
    radius_proxy: float
    omitted: tuple[str, ...] = ()

    @property
    def radius_violation(self) -> bool:
        return self.radius_proxy >= RADIUS_LIMIT

    def effective_hamiltonian(self, delta: float) -> ComplexMatrix:
        """H = i Omega / delta, the generator handed to the variational layer."""
        return 1j * self.omega / delta


@dataclass(slots=True)
class _TermGroup:
    matrices: list[ComplexMatrix] = field(default_factory=list)
    index: list[tuple[int, ...]] = field(default_factory=list)

    def add(self, c: ComplexMatrix, index: tuple[int, ...], *factors: ComplexMatrix) -> None:
        if not vanishes(c, *factors):
            self.matrices.append(c)
            self.index.append(index)


def resolve_order(
    order: int, drift: ComplexMatrix, noise: tuple[ComplexMatrix, ...], strict: bool = False,
    structure: bool | None = None,
) -> int:
    """Downgrade Scheme IV to III when the reduced fourth-order form does not apply."""
    if order != 4:
        return order
    if structure is None:
        structure = fourth_order_structure(drift, noise)
    if structure:
        return 4
    message = "Scheme IV needs commuting noise generators and vanishing [[G_m, G_0], G_n] terms"
    if strict:
        raise SchemeStructureError(message)
    logger.warning(f"{message}; falling back to Scheme III")
    return 3


class MagnusAssembler:
    def __init__(
        self,
        drift: ComplexMatrix,
        noise: tuple[ComplexMatrix, ...],
        order: int,
        strict_order: bool = False,
        mixed_modes: int = DEFAULT_MODES,
        noise_commute: bool | None = None,
        structure: bool | None = None,
    ):
        if order not in (1, 2, 3, 4):
            raise ValueError(f"Invalid scheme order: {order}")
        self.drift = drift
        self.noise = tuple(noise)
        self.d = len(self.noise)
        self.order = resolve_order(order, drift, self.noise, strict_order, structure)
        self.mixed_modes = mixed_modes
        if noise_commute is None:
            noise_commute = noise_generators_commute(self.noise)
        self.mixed_quadrature = self.order >= 3 and (self.d == 1 or noise_commute)
        self.omitted = (MIXED_TRIPLE,) if self.order >= 3 and not self.mixed_quadrature else ()

        self.drift_norm = operator_norm(drift)
        self.noise_norms = np.array([operator_norm(g) for g in self.noise])
        self._brackets = {
            (j, k): commutator(self.noise[j], self.noise[k]) for j in range(self.d) for k in range(j)
        } if self.order >= 3 else {}
        self._noise_groups = self._build_noise_groups()
        self._build()

    def with_drift(self, drift: ComplexMatrix) -> "MagnusAssembler":
        """Same scheme and noise terms around another drift; only drift commutators are rebuilt."""
        if drift.shape != self.drift.shape:
            raise ValueError(f"Drift of shape {drift.shape}, generators of shape {self.drift.shape}")
        assembler = copy.copy(self)
        assembler.drift = drift
        assembler.drift_norm = operator_norm(drift)
        assembler._build()
        return assembler

    def _build_noise_groups(self) -> dict[str, _TermGroup]:
        gs, d = self.noise, self.d
        groups = {name: _TermGroup() for name in NOISE_GROUPS}
        if self.order >= 2:
            for j in range(d):
                for i in range(j):
                    groups["levy"].add(commutator(gs[i], gs[j]), (i, j), gs[i], gs[j])
        if self.order >= 3:
            for (j, k), inner in self._brackets.items():
                for i in range(d):
                    groups["mixed_levy_noise"].add(commutator(gs[i], inner), (i, j, k), gs[i], gs[j], gs[k])
        return groups

    def _build(self) -> None:
        g0, gs, d = self.drift, self.noise, self.d
        groups = {name: _TermGroup() for name in GROUPS}
        groups.update(self._noise_groups)
        if self.order >= 2:
            for j in range(d):
                groups["drift_noise"].add(commutator(g0, gs[j]), (j,), g0, gs[j])
        if self.order >= 3:
            noise_drift = [commutator(g, g0) for g in gs]
            for j in range(d):
                groups["double_drift"].add(commutator(g0, noise_drift[j]), (j,), g0, gs[j], g0)
                for i in range(d):
                    groups["mixed_drift_noise"].add(
                        commutator(gs[i], noise_drift[j]), (i, j), gs[i], gs[j], g0
                    )
            for (j, k), inner in self._brackets.items():
                groups["mixed_levy_drift"].add(commutator(g0, inner), (j, k), g0, gs[j], gs[k])
        if self.order >= 4:
            for m in range(d):
                x = commutator(commutator(commutator(gs[m], g0), g0), g0)
                groups["fourth"].add(x, (m,), gs[m], g0, g0, g0)

        self._groups = {name: group for name, group in groups.items() if group.matrices}
        stack = [g0, *gs] + [c for group in self._groups.values() for c in group.matrices]
        self.stack = np.array(stack, dtype=np.complex128).reshape(len(stack), *g0.shape)

    @property
    def n_terms(self) -> int:
        return self.stack.shape[0]

    def coefficients(self, inc: StochasticIncrementSet) -> np.ndarray:
        if inc.d != self.d:
            raise ValueError(f"Increments for {inc.d} channels, generators for {self.d}")
        if self.order >= 2 and inc.order < self.order:
            raise ValueError(f"Increments sampled for order {inc.order}, scheme needs {self.order}")
        delta = inc.delta
        parts = [np.array([delta]), inc.w]
        for name, group in self._groups.items():
            index = np.array(group.index, dtype=int)
            match name:
                case "drift_noise":
                    parts.append(inc.c2[index[:, 0]])
                case "levy":
                    parts.append(inc.levy[index[:, 0], index[:, 1]])
                case "double_drift":
                    parts.append(inc.c3[index[:, 0]])
                case "mixed_drift_noise":
                    parts.append(self._mixed_drift_noise(inc, index[:, 0], index[:, 1]))
                case "mixed_levy_drift":
                    parts.append(delta * inc.levy[index[:, 1], index[:, 0]] / 6.0)
                case "mixed_levy_noise":
                    parts.append(inc.w[index[:, 0]] * inc.levy[index[:, 2], index[:, 1]] / 6.0)
                case "fourth":
                    parts.append(inc.c4[index[:, 0]])
        return np.concatenate(parts)

    def _mixed_drift_noise(self, inc: StochasticIncrementSet, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        # J_i (J_j0 - J_0j) / 12 with J_j0 - J_0j = delta a_j0
        coefficient = inc.w[i] * inc.delta * inc.a0[j] / 12.0
        if self.mixed_quadrature:
            j0i, j_0i = drift_noise_triple_integrals(fourier_path_increments(inc, self.mixed_modes))
            coefficient = coefficient + (j0i[j, i] - j_0i[j, i]) / 3.0
        return coefficient

    def radius_proxy(self, inc: StochasticIncrementSet) -> float:
        return float(inc.delta * self.drift_norm + np.abs(inc.w) @ self.noise_norms)

    def omega(self, inc: StochasticIncrementSet) -> "MagnusOperator":
        omega = np.tensordot(self.coefficients(inc), self.stack, axes=1)
        return MagnusOperator(
            omega=omega, order=self.order, radius_proxy=self.radius_proxy(inc), omitted=self.omitted
        )

    def omega_batch(self, incs: list[StochasticIncrementSet]) -> tuple[np.ndarray, np.ndarray]:
        """Stacked Omega matrices and radius proxies of consecutive steps."""
        coefficients = np.array([self.coefficients(inc) for inc in incs])
        proxies = np.array([self.radius_proxy(inc) for inc in incs])
        return np.tensordot(coefficients, self.stack, axes=1), proxies


def magnus_omega(
    g0: ComplexMatrix,
    gs: list[ComplexMatrix],
    inc: StochasticIncrementSet,
    order: int,
    strict_order: bool = False,
    mixed_modes: int = DEFAULT_MODES,
) -> MagnusOperator:
    return MagnusAssembler(g0, tuple(gs), order, strict_order, mixed_modes).omega(inc)


def fourth_order_from_permutations(
    g0: ComplexMatrix,
    gs: list[ComplexMatrix],
    j000m: np.ndarray,
    j00m0: np.ndarray,
    j0m00: np.ndarray,
    jm000: np.ndarray,
) -> ComplexMatrix:
    """
    Fourth-order term assembled from the four cyclic index permutations.

    Valid under the reduced fourth-order structure, where every quadruple commutator with a
    single noise index collapses to +-[[[G_m, G_0], G_0], G_0]; equals the reduced term
    (J_0m00 - J_00m0)/6 identically.
    """
    total = np.zeros_like(g0)
    for m, gm in enumerate(gs):
        x = commutator(commutator(commutator(gm, g0), g0), g0)
        weight = (
            (j000m[m] - j00m0[m])
            - (j00m0[m] - j0m00[m])
            + (j0m00[m] - jm000[m])
            + (jm000[m] - j000m[m])
        )
        total += x * weight / 12.0
    return total
