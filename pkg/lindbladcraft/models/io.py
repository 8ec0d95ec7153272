import json
import logging
from threading import Lock
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from lindbladcraft.errors import ConfigError, ModelValidationError
from lindbladcraft.models.lindblad import LindbladModel, population_observables
from lindbladcraft.models.states import InitialState

model_file_lock = Lock()


class MatrixPayload(BaseModel):
    real: list[list[float]]
    imag: list[list[float]] | None = None

    def to_array(self) -> np.ndarray:
        real = np.asarray(self.real, dtype=float)
        if self.imag is None:
            return real.astype(np.complex128)
        imag = np.asarray(self.imag, dtype=float)
        if imag.shape != real.shape:
            raise ModelValidationError(f"Real part {real.shape} and imaginary part {imag.shape} differ")
        return real + 1j * imag


class VectorPayload(BaseModel):
    real: list[float]
    imag: list[float] | None = None

    def to_array(self) -> np.ndarray:
        real = np.asarray(self.real, dtype=float)
        imag = np.zeros_like(real) if self.imag is None else np.asarray(self.imag, dtype=float)
        if imag.shape != real.shape:
            raise ModelValidationError("Initial state real and imaginary parts differ in length")
        return real + 1j * imag


class ModelFile(BaseModel):
    """JSON layout of a user-defined Lindblad model."""

    name: str = "custom"
    dim: int = Field(ge=1)
    hamiltonian: MatrixPayload
    jump_ops: list[MatrixPayload] = Field(default_factory=list)
    observables: dict[str, MatrixPayload] = Field(default_factory=dict)
    populations: bool = True
    initial: VectorPayload | None = None
    initial_index: int = Field(default=0, ge=0)
    time_unit: Literal["tJ", "fs", "s", "arb"] = "arb"
    unit_note: str = ""

    @field_validator("name")
    @classmethod
    def validate_name(cls, v):
        if not v.strip():
            raise ValueError(f"Invalid model name: {v!r}")
        return v


def model_from_payload(payload: ModelFile) -> tuple[LindbladModel, InitialState]:
    dim = payload.dim
    hamiltonian = payload.hamiltonian.to_array()
    if hamiltonian.shape != (dim, dim):
        raise ModelValidationError(f"Hamiltonian shape {hamiltonian.shape} does not match dim {dim}")

    observables = population_observables(dim, [f"P{i}" for i in range(dim)]) if payload.populations else {}
    observables.update({name: op.to_array() for name, op in payload.observables.items()})

    model = LindbladModel(
        name=payload.name,
        hamiltonian=hamiltonian,
        jump_ops=tuple(op.to_array() for op in payload.jump_ops),
        observables=observables,
        time_unit=payload.time_unit,
        unit_note=payload.unit_note,
    )
    if payload.initial is not None:
        psi0 = payload.initial.to_array()
        if psi0.shape != (dim,):
            raise ModelValidationError(f"Initial state has {psi0.shape[0]} amplitudes, expected {dim}")
        initial = InitialState.pure(psi0)
    elif payload.initial_index < dim:
        initial = InitialState.basis_state(dim, payload.initial_index)
    else:
        raise ModelValidationError(f"Initial index {payload.initial_index} out of range for dim {dim}")
    return model, initial


def load_model_file(filepath: str) -> tuple[LindbladModel, InitialState]:
    with model_file_lock:
        try:
            with open(filepath) as f:
                payload = ModelFile(**json.load(f))
        except FileNotFoundError:
            logging.error(f"File {filepath} not found")
            raise ConfigError(f"Model file {filepath} not found") from None
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"Invalid model file {filepath}: {e}") from e
    model, initial = model_from_payload(payload)
    logging.info(f"Loaded model {model.name}: dim {model.dim}, {model.n_noise} jump operators")
    return model, initial
