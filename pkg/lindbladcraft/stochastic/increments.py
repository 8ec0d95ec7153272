"""
Per-step Wiener increments and multiple Stratonovich integral coefficients.

Each channel draws one block of standard normals per step: the increment W, Fourier
coefficients a_r, b_r of the Brownian bridge for r = 1..p and one normal for the truncated
tail of a_0. Every coefficient of a step is assembled from that shared block.
"""

import functools
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from lindbladcraft.logger import get_logger

logger = get_logger(__name__)

DEFAULT_TRUNCATION = 200
STEP_BLOCK = 256


@dataclass(slots=True, frozen=True)
class StochasticIncrementSet:
    """
    One step's sampled integrals for ``d`` noise channels.

    w: increments W_j ~ N(0, delta)
    a0: a_{j,0} ~ N(0, delta/3)
    levy: antisymmetric (J_ji - J_ij) / 2
    c2: delta * a_{j,0} / 2, the drift-noise coefficient
    c3: -delta^2 b_j / (2 pi)
    c4: (J_0j00 - J_00j0) / 6
    a, b: bridge coefficients (d, p); empty below order 2
    """

    delta: float
    order: int
    p: int
    w: np.ndarray
    a0: np.ndarray
    levy: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    c4: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def d(self) -> int:
        return self.w.shape[0]


@dataclass(slots=True, frozen=True)
class CoefficientBatch:
    w: np.ndarray
    a0: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    c4: np.ndarray


def _validate(delta: float, p: int, order: int) -> None:
    if not delta > 0:
        raise ValueError(f"Invalid step length: {delta}")
    if p < 1:
        raise ValueError(f"Invalid truncation order: {p}")
    if order not in (1, 2, 3, 4):
        raise ValueError(f"Invalid scheme order: {order}")


@functools.lru_cache(maxsize=32)
def _tail_variance(p: int) -> float:
    """Variance of a_0 not carried by the first p modes, in units of delta."""
    r = np.arange(1, p + 1)
    return max(1.0 / 12.0 - float(np.sum(1.0 / r**2)) / (2.0 * np.pi**2), 0.0)


def block_width(p: int, order: int) -> int:
    return 1 if order == 1 else 2 * p + 2


def truncation_error_bound(delta: float, p: int) -> float:
    """Mean-square error bound of the p-term bridge expansion, delta^2 / (2 pi^2 p)."""
    if p < 1:
        raise ValueError(f"Invalid truncation order: {p}")
    return delta**2 / (2.0 * np.pi**2 * p)


def _expand(z: np.ndarray, delta: float, p: int) -> dict[str, np.ndarray]:
    """Coefficients from normals of shape (..., d, 2p + 2)."""
    r = np.arange(1, p + 1)
    scale = np.sqrt(delta / 2.0) / (np.pi * r)
    w = np.sqrt(delta) * z[..., 0]
    a = z[..., 1 : p + 1] * scale
    b = z[..., p + 1 : 2 * p + 1] * scale
    a0 = -2.0 * a.sum(axis=-1) - 2.0 * np.sqrt(delta * _tail_variance(p)) * z[..., 2 * p + 1]

    x = np.einsum("...ir,...jr->...ij", a * r, b)
    area = (np.pi / delta) * (x - np.swapaxes(x, -1, -2))
    wa = w[..., :, None] * a0[..., None, :]
    levy = 0.5 * (wa - np.swapaxes(wa, -1, -2)) + delta * np.swapaxes(area, -1, -2)

    return {
        "w": w,
        "a0": a0,
        "levy": levy,
        "c2": 0.5 * delta * a0,
        "c3": -(delta**2) * (b / r).sum(axis=-1) / (2.0 * np.pi),
        "c4": -(delta**3) * (a / r**2).sum(axis=-1) / (4.0 * np.pi**2),
        "a": a,
        "b": b,
    }


def _first_order(z: np.ndarray, delta: float) -> dict[str, np.ndarray]:
    d = z.shape[-2]
    zeros = np.zeros(z.shape[:-1])
    return {
        "w": np.sqrt(delta) * z[..., 0],
        "a0": zeros,
        "levy": np.zeros(z.shape[:-2] + (d, d)),
        "c2": zeros,
        "c3": zeros,
        "c4": zeros,
        "a": np.zeros(z.shape[:-1] + (0,)),
        "b": np.zeros(z.shape[:-1] + (0,)),
    }


def iter_increments(
    n_steps: int,
    d: int,
    delta: float,
    p: int = DEFAULT_TRUNCATION,
    order: int = 2,
    rng: np.random.Generator | None = None,
) -> Iterator[StochasticIncrementSet]:
    """
    Yield the increments of ``n_steps`` consecutive steps.

    Step n always consumes the n-th block of the stream, so the values do not depend on
    how the steps are chunked.
    """
    _validate(delta, p, order)
    if d < 0 or n_steps < 0:
        raise ValueError(f"Invalid sampling request: n_steps={n_steps}, d={d}")
    rng = np.random.default_rng() if rng is None else rng
    width = block_width(p, order)

    for start in range(0, n_steps, STEP_BLOCK):
        size = min(STEP_BLOCK, n_steps - start)
        z = rng.standard_normal((size, d, width))
        fields = _first_order(z, delta) if order == 1 else _expand(z, delta, p)
        for n in range(size):
            yield StochasticIncrementSet(
                delta=delta, order=order, p=p, **{name: value[n] for name, value in fields.items()}
            )


def sample_increment_path(
    n_steps: int,
    d: int,
    delta: float,
    p: int = DEFAULT_TRUNCATION,
    order: int = 2,
    rng: np.random.Generator | None = None,
) -> list[StochasticIncrementSet]:
    return list(iter_increments(n_steps, d, delta, p, order, rng))


def sample_increments(
    d: int,
    delta: float,
    p: int = DEFAULT_TRUNCATION,
    order: int = 2,
    rng: np.random.Generator | None = None,
) -> StochasticIncrementSet:
    return next(iter_increments(1, d, delta, p, order, rng))


def sample_coefficient_batch(
    n_samples: int,
    delta: float,
    p: int = DEFAULT_TRUNCATION,
    rng: np.random.Generator | None = None,
    chunk: int = 8192,
) -> CoefficientBatch:
    """Single-channel coefficient samples, drawn in chunks to bound memory."""
    _validate(delta, p, 4)
    rng = np.random.default_rng() if rng is None else rng
    parts: dict[str, list[np.ndarray]] = {name: [] for name in ("w", "a0", "c2", "c3", "c4")}
    for start in range(0, n_samples, chunk):
        size = min(chunk, n_samples - start)
        fields = _expand(rng.standard_normal((size, 1, 2 * p + 2)), delta, p)
        for name, values in parts.items():
            values.append(fields[name][:, 0])
    logger.debug(f"Sampled {n_samples} coefficient sets at delta={delta}, p={p}")
    return CoefficientBatch(**{name: np.concatenate(values) for name, values in parts.items()})
