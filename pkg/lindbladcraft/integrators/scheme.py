from dataclasses import dataclass, replace
from enum import StrEnum

from lindbladcraft.stochastic.increments import DEFAULT_TRUNCATION

ROMAN = {1: "I", 2: "II", 3: "III", 4: "IV"}


class Unraveling(StrEnum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"


class Method(StrEnum):
    MAGNUS = "magnus"
    EULER_MARUYAMA = "euler_maruyama"


@dataclass(slots=True, frozen=True)
class SchemeConfig:
    """
    Integrator settings of one ensemble run.

    ``delta`` overrides the run step length when set. ``strict_order`` turns the Scheme IV
    structure check into a hard error instead of a downgrade to Scheme III.
    """

    order: int = 1
    unraveling: Unraveling = Unraveling.LINEAR
    rkmk_correction: bool = False
    delta: float | None = None
    radius_check: bool = True
    method: Method = Method.MAGNUS
    truncation: int = DEFAULT_TRUNCATION
    strict_order: bool = False
    mixed_integral_modes: int = 32

    def __post_init__(self):
        object.__setattr__(self, "unraveling", Unraveling(self.unraveling))
        object.__setattr__(self, "method", Method(self.method))
        if self.order not in ROMAN:
            raise ValueError(f"Invalid scheme order: {self.order}")
        if self.rkmk_correction and self.unraveling is not Unraveling.NONLINEAR:
            raise ValueError("RKMK correction requires the nonlinear unraveling")
        if self.method is Method.EULER_MARUYAMA:
            if self.unraveling is not Unraveling.LINEAR:
                raise ValueError("Euler-Maruyama is only available for the linear unraveling")
            if self.rkmk_correction:
                raise ValueError("Euler-Maruyama has no RKMK correction")
        if self.delta is not None and not self.delta > 0:
            raise ValueError(f"Invalid step length: {self.delta}")
        if self.truncation < 1:
            raise ValueError(f"Invalid truncation order: {self.truncation}")
        if self.mixed_integral_modes < 1:
            raise ValueError(f"Invalid number of quadrature modes: {self.mixed_integral_modes}")

    @property
    def is_linear(self) -> bool:
        return self.unraveling is Unraveling.LINEAR

    @property
    def label(self) -> str:
        name = "EM" if self.method is Method.EULER_MARUYAMA else f"Scheme {ROMAN[self.order]}"
        parts = [name, self.unraveling.value]
        if self.rkmk_correction:
            parts.append("rkmk")
        label = " ".join(parts)
        return label if self.delta is None else f"{label} @ {self.delta:g}"

    def step_length(self, default: float) -> float:
        return default if self.delta is None else self.delta

    def with_order(self, order: int) -> "SchemeConfig":
        return replace(self, order=order)
