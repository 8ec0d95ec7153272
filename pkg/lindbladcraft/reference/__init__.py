from lindbladcraft.reference.superoperator import (
    ReferenceSeries,
    SteadyState,
    build_superoperator,
    check_density_matrix,
    propagate_exact,
    reference_series,
    steady_state,
    unvectorize,
    vectorize,
    write_reference_csv,
)

__all__ = (
    "ReferenceSeries",
    "SteadyState",
    "build_superoperator",
    "check_density_matrix",
    "propagate_exact",
    "reference_series",
    "steady_state",
    "unvectorize",
    "vectorize",
    "write_reference_csv",
)
