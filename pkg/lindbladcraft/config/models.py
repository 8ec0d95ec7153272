import math
from dataclasses import dataclass, field, replace
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from lindbladcraft.integrators.scheme import SchemeConfig

STEP_COUNT_RTOL = 1e-9


@dataclass(slots=True)
class ModelSpec:
    """Built-in model ``name`` with builder ``params``, or a JSON model ``file``."""

    name: str | None = None
    file: str | None = None
    params: dict[str, Any] = field(default_factory=dict)
    initial_index: int | None = None

    def __post_init__(self):
        if (self.name is None) == (self.file is None):
            raise ValueError("Exactly one of model name and model file is required")


@dataclass(slots=True)
class EnsembleSpec:
    n_traj: int = 1000
    n_repeats: int = 1
    master_seed: int = 0
    workers: int | None = None
    executor: Literal["thread", "process"] = "thread"

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValueError(f"Invalid n_traj: {self.n_traj}")
        if self.n_repeats < 1:
            raise ValueError(f"Invalid n_repeats: {self.n_repeats}")
        if self.master_seed < 0:
            raise ValueError(f"Invalid master_seed: {self.master_seed}")


@dataclass(slots=True)
class OutputSpec:
    directory: str = "results"
    plots: bool = True


@dataclass(slots=True)
class VqsSpec:
    ansatz: str = "tfim"
    file: str | None = None
    blocks: int = 3
    substeps: int = 10
    regularization: float = 1e-8
    shots: int | None = None

    def __post_init__(self):
        if self.blocks < 1 or self.substeps < 1:
            raise ValueError(f"Invalid ansatz settings: blocks={self.blocks}, substeps={self.substeps}")
        if self.regularization < 0:
            raise ValueError(f"Invalid regularization: {self.regularization}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"Invalid shots: {self.shots}")


class RunConfig(BaseModel):
    name: str
    version: str = "1.0"
    model: ModelSpec
    schemes: list[SchemeConfig] = Field(default_factory=lambda: [SchemeConfig()], min_length=1)
    delta: float = Field(gt=0)
    t_stop: float = Field(gt=0)
    time_unit: Literal["tJ", "fs", "s", "arb"] | None = None
    truncation: int | None = Field(default=None, ge=1)
    observables: list[str] | None = None
    ensemble: EnsembleSpec = Field(default_factory=EnsembleSpec)
    outputs: OutputSpec = Field(default_factory=OutputSpec)
    compare_exact: bool = True
    deltas: list[float] = Field(default_factory=list)
    angles_deg: list[float] = Field(default_factory=list)
    vqs: VqsSpec | None = None

    class Config:
        populate_by_name = True

    @field_validator("deltas")
    @classmethod
    def validate_deltas(cls, v):
        for delta in v:
            if not delta > 0:
                raise ValueError(f"Invalid step length: {delta}")
        return v

    @field_validator("angles_deg")
    @classmethod
    def validate_angles(cls, v):
        for angle in v:
            if not 0.0 <= angle <= 90.0:
                raise ValueError(f"Invalid angle: {angle}")
        return v

    @model_validator(mode="after")
    def validate_step_count(self):
        ratio = self.t_stop / self.delta
        if round(ratio) < 1 or not math.isclose(ratio, round(ratio), rel_tol=STEP_COUNT_RTOL):
            raise ValueError(f"Invalid t_stop/delta: {self.t_stop}/{self.delta} is not a whole number of steps")
        return self

    @property
    def n_steps(self) -> int:
        return round(self.t_stop / self.delta)

    def resolved_schemes(self) -> list[SchemeConfig]:
        """Schemes with the run-level Fourier truncation applied."""
        if self.truncation is None:
            return list(self.schemes)
        return [replace(scheme, truncation=self.truncation) for scheme in self.schemes]
