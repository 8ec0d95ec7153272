from lindbladcraft.integrators.drift import (
    GeneratorSet,
    drift_linear,
    drift_nonlinear,
    generator_set,
    ito_drift,
)
from lindbladcraft.integrators.magnus import (
    MagnusAssembler,
    MagnusOperator,
    fourth_order_from_permutations,
    magnus_omega,
    resolve_order,
)
from lindbladcraft.integrators.scheme import Method, SchemeConfig, Unraveling
from lindbladcraft.integrators.steps import (
    StepOutcome,
    TrajectoryPropagator,
    step_em,
    step_magnus,
    step_rkmk,
)

__all__ = (
    "GeneratorSet",
    "MagnusAssembler",
    "MagnusOperator",
    "Method",
    "SchemeConfig",
    "StepOutcome",
    "TrajectoryPropagator",
    "Unraveling",
    "drift_linear",
    "drift_nonlinear",
    "fourth_order_from_permutations",
    "generator_set",
    "ito_drift",
    "magnus_omega",
    "resolve_order",
    "step_em",
    "step_magnus",
    "step_rkmk",
)
