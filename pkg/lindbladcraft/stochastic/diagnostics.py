from dataclasses import dataclass

import numpy as np
import scipy.stats

from lindbladcraft.logger import get_logger
from lindbladcraft.stochastic.increments import (
    DEFAULT_TRUNCATION,
    sample_coefficient_batch,
    truncation_error_bound,
)
from lindbladcraft.stochastic.streams import trajectory_stream

logger = get_logger(__name__)

VARIANCE_RTOL = 0.05


def expected_variances(delta: float) -> dict[str, float]:
    """Exact variances of the single-channel step coefficients."""
    return {
        "w": delta,
        "a0": delta / 3,
        "c2": delta**3 / 12,
        "c3": delta**5 / 720,
        "c4": delta**7 / 30240,
    }


@dataclass(slots=True, frozen=True)
class CoefficientCheck:
    name: str
    expected: float
    empirical: float
    mean: float

    @property
    def relative_error(self) -> float:
        return abs(self.empirical - self.expected) / self.expected

    @property
    def ok(self) -> bool:
        return self.relative_error <= VARIANCE_RTOL


@dataclass(slots=True, frozen=True)
class SamplerDiagnostics:
    delta: float
    truncation: int
    n_samples: int
    checks: tuple[CoefficientCheck, ...]
    ks_pvalue: float
    truncation_mse_bound: float

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)


def sampler_diagnostics(
    delta: float,
    truncation: int = DEFAULT_TRUNCATION,
    n_samples: int = 1_000_000,
    master_seed: int = 0,
) -> SamplerDiagnostics:
    """Empirical coefficient variances against their closed forms, plus a KS test of W."""
    batch = sample_coefficient_batch(n_samples, delta, truncation, rng=trajectory_stream(master_seed))
    checks = tuple(
        CoefficientCheck(
            name=name,
            expected=expected,
            empirical=float(np.var(getattr(batch, name), ddof=1)),
            mean=float(np.mean(getattr(batch, name))),
        )
        for name, expected in expected_variances(delta).items()
    )
    ks = scipy.stats.kstest(batch.w / np.sqrt(delta), "norm")
    for check in checks:
        if not check.ok:
            logger.warning(
                f"Variance of {check.name} off by {check.relative_error:.1%}: "
                f"{check.empirical:.4e} vs {check.expected:.4e}"
            )
    return SamplerDiagnostics(
        delta=delta,
        truncation=truncation,
        n_samples=n_samples,
        checks=checks,
        ks_pvalue=float(ks.pvalue),
        truncation_mse_bound=truncation_error_bound(delta, truncation),
    )
