import functools
import json
import logging
from dataclasses import dataclass, field, replace
from threading import Lock
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from lindbladcraft.errors import ConfigError
from lindbladcraft.integrators.drift import generator_set
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.operators.algebra import ComplexMatrix, pad_to_qubits
from lindbladcraft.operators.pauli import (
    DROP_THRESHOLD,
    is_pauli_label,
    measurement_strings,
    pauli_decompose,
    pauli_string_matrix,
)

ansatz_file_lock = Lock()

GateName = Literal["CNOT", "CZ", "H", "X", "S"]

_SINGLE_QUBIT = {
    "H": np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
}
_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def _on_qubits(factors: dict[int, np.ndarray], n_qubits: int) -> ComplexMatrix:
    eye = np.eye(2, dtype=np.complex128)
    return functools.reduce(np.kron, [factors.get(q, eye) for q in range(n_qubits)])


@dataclass(slots=True, frozen=True)
class FixedGate:
    """Non-parameterized gate applied before generator ``position`` of every block."""

    gate: GateName
    qubits: tuple[int, ...]
    position: int = 0

    def matrix(self, n_qubits: int) -> ComplexMatrix:
        if any(q < 0 or q >= n_qubits for q in self.qubits):
            raise ValueError(f"Gate {self.gate} on {self.qubits} outside {n_qubits} qubits")
        if self.gate in ("CNOT", "CZ"):
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.gate} needs two distinct qubits, got {self.qubits}")
            control, target = self.qubits
            flip = _SINGLE_QUBIT["X"] if self.gate == "CNOT" else np.diag([1, -1]).astype(np.complex128)
            return _on_qubits({control: _P0}, n_qubits) + _on_qubits({control: _P1, target: flip}, n_qubits)
        if len(self.qubits) != 1:
            raise ValueError(f"{self.gate} acts on one qubit, got {self.qubits}")
        return _on_qubits({self.qubits[0]: _SINGLE_QUBIT[self.gate]}, n_qubits)


@dataclass(slots=True, frozen=True)
class HvaAnsatz:
    """
    Layered Pauli-rotation circuit exp(-i theta Q / 2) on a computational reference state.

    ``generators`` are listed in application order within a block; parameter k of block p
    has index p * len(generators) + k.
    """

    n_qubits: int
    generators: tuple[str, ...]
    blocks: int = 1
    fixed_gates: tuple[FixedGate, ...] = ()
    reference: str = ""

    def __post_init__(self):
        if self.n_qubits < 1 or self.blocks < 1:
            raise ValueError(f"Invalid ansatz size: {self.n_qubits} qubits, {self.blocks} blocks")
        for label in self.generators:
            if not is_pauli_label(label, self.n_qubits):
                raise ValueError(f"Invalid generator {label!r} for {self.n_qubits} qubits")
        reference = self.reference or "0" * self.n_qubits
        if len(reference) != self.n_qubits or set(reference) - {"0", "1"}:
            raise ValueError(f"Invalid reference bitstring: {reference!r}")
        object.__setattr__(self, "reference", reference)
        for gate in self.fixed_gates:
            gate.matrix(self.n_qubits)
            if not 0 <= gate.position <= len(self.generators):
                raise ValueError(f"Invalid gate position: {gate.position}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def n_params(self) -> int:
        return self.blocks * len(self.generators)

    def reference_state(self) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=np.complex128)
        psi[int(self.reference, 2)] = 1.0
        return psi

    def with_reference(self, index: int) -> "HvaAnsatz":
        return replace(self, reference=format(index, f"0{self.n_qubits}b"))

    def layout(self) -> list[tuple[int | None, ComplexMatrix]]:
        """
        Gate sequence as (parameter index or None, matrix); rotation entries carry the
        generator Q rather than the rotation.
        """
        fixed = [(gate.position, gate.matrix(self.n_qubits)) for gate in self.fixed_gates]
        sequence = []
        for p in range(self.blocks):
            for k, label in enumerate(self.generators):
                sequence.extend((None, m) for position, m in fixed if position == k)
                sequence.append((p * len(self.generators) + k, pauli_string_matrix(label)))
            sequence.extend((None, m) for position, m in fixed if position == len(self.generators))
        return sequence


TFIM_GENERATORS = ("IX", "XI", "IY", "YI", "IZ", "ZI", "ZZ")


def tfim_ansatz(blocks: int = 3) -> HvaAnsatz:
    """Two-site TFIM HVA starting from |11>."""
    return HvaAnsatz(n_qubits=2, generators=TFIM_GENERATORS, blocks=blocks, reference="11")


def hva_from_model(model: LindbladModel, blocks: int = 2, threshold: float = DROP_THRESHOLD) -> HvaAnsatz:
    """
    Generators from the Pauli strings of the padded drift and jump operators.

    Single-qubit X and Y rotations come first in every block; identity strings are dropped.
    """
    generators = generator_set(model)
    labels: list[str] = []
    n_qubits = 1
    for op in (generators.drift_linear, *generators.noise):
        padded, n_qubits = pad_to_qubits(op)
        for label in pauli_decompose(padded, threshold).terms:
            if set(label) != {"I"} and label not in labels:
                labels.append(label)
    singles = [
        "I" * q + axis + "I" * (n_qubits - q - 1) for axis in "XY" for q in range(n_qubits)
    ]
    ordered = singles + sorted(label for label in labels if label not in singles)
    return HvaAnsatz(n_qubits=n_qubits, generators=tuple(ordered), blocks=blocks)


def measured_strings(model: LindbladModel) -> frozenset[str]:
    """Pauli strings whose expectations enter V for this model, identity excluded."""
    generators = generator_set(model)
    labels = measurement_strings((generators.drift_linear, *generators.noise))
    return frozenset(label for label in labels if set(label) != {"I"})


class FixedGateFile(BaseModel):
    gate: GateName
    qubits: list[int]
    position: int = Field(default=0, ge=0)


class AnsatzFile(BaseModel):
    n_qubits: int = Field(ge=1)
    generators: list[str]
    blocks: int = Field(default=1, ge=1)
    fixed_gates: list[FixedGateFile] = Field(default_factory=list)
    reference: str = ""

    @field_validator("generators")
    @classmethod
    def validate_generators(cls, v):
        for label in v:
            if not is_pauli_label(label):
                raise ValueError(f"Invalid Pauli string: {label}")
        return v

    def to_ansatz(self) -> HvaAnsatz:
        return HvaAnsatz(
            n_qubits=self.n_qubits,
            generators=tuple(self.generators),
            blocks=self.blocks,
            fixed_gates=tuple(
                FixedGate(gate=g.gate, qubits=tuple(g.qubits), position=g.position)
                for g in self.fixed_gates
            ),
            reference=self.reference,
        )


def load_ansatz_file(filepath: str) -> HvaAnsatz:
    with ansatz_file_lock:
        try:
            with open(filepath) as f:
                payload = AnsatzFile(**json.load(f))
        except FileNotFoundError:
            logging.error(f"File {filepath} not found")
            raise ConfigError(f"Ansatz file {filepath} not found") from None
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"Invalid ansatz file {filepath}: {e}") from e
    try:
        return payload.to_ansatz()
    except ValueError as e:
        raise ConfigError(f"Invalid ansatz in {filepath}: {e}") from e


@dataclass(slots=True)
class AnsatzCatalog:
    """Named ansatz builders; ``model`` builds the Pauli-string HVA of the run's model."""

    blocks: int = 3
    _builders: dict = field(
        default_factory=lambda: {
            "tfim": lambda model, blocks: tfim_ansatz(blocks),
            "model": lambda model, blocks: hva_from_model(model, blocks),
        }
    )

    def names(self) -> list[str]:
        return list(self._builders)

    def build(self, name: str, model: LindbladModel) -> HvaAnsatz:
        try:
            builder = self._builders[name]
        except KeyError:
            raise ValueError(f"No ansatz named {name!r}; available: {self.names()}") from None
        return builder(model, self.blocks)
