from lindbladcraft.stochastic.diagnostics import SamplerDiagnostics, expected_variances, sampler_diagnostics
from lindbladcraft.stochastic.fourier_path import (
    drift_noise_triple_integrals,
    fourier_path_increments,
    iterated_integral,
)
from lindbladcraft.stochastic.increments import (
    DEFAULT_TRUNCATION,
    CoefficientBatch,
    StochasticIncrementSet,
    iter_increments,
    sample_coefficient_batch,
    sample_increment_path,
    sample_increments,
    truncation_error_bound,
)
from lindbladcraft.stochastic.streams import (
    StreamKey,
    TrajectoryStreams,
    trajectory_stream,
    trajectory_streams,
)

__all__ = (
    "DEFAULT_TRUNCATION",
    "CoefficientBatch",
    "SamplerDiagnostics",
    "StochasticIncrementSet",
    "StreamKey",
    "TrajectoryStreams",
    "drift_noise_triple_integrals",
    "expected_variances",
    "fourier_path_increments",
    "iter_increments",
    "iterated_integral",
    "sample_coefficient_batch",
    "sample_increment_path",
    "sample_increments",
    "sampler_diagnostics",
    "trajectory_stream",
    "trajectory_streams",
    "truncation_error_bound",
)
