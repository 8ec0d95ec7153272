import functools

import numpy as np

from lindbladcraft.stochastic.increments import StochasticIncrementSet

DEFAULT_MODES = 32
POINTS_PER_MODE = 16


@functools.lru_cache(maxsize=16)
def _basis(n_modes: int, n_grid: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = np.linspace(0.0, 1.0, n_grid)
    phase = 2.0 * np.pi * np.outer(np.arange(1, n_modes + 1), s)
    cos, sin = np.cos(phase) - 1.0, np.sin(phase)
    for a in (s, cos, sin):
        a.setflags(write=False)
    return s, cos, sin


def fourier_path_increments(
    inc: StochasticIncrementSet, n_modes: int = DEFAULT_MODES, n_grid: int | None = None
) -> np.ndarray:
    """
    Grid increments of time and of the truncated bridge path for each channel.

    Row 0 holds dt, row j + 1 the increments of W_j(t) = (t/delta) W_j
    + sum_r a_{j,r}(cos(2 pi r t/delta) - 1) + b_{j,r} sin(2 pi r t/delta).
    """
    q = min(n_modes, inc.a.shape[-1])
    n_grid = n_grid or POINTS_PER_MODE * max(q, 1) + 1
    s, cos, sin = _basis(q, n_grid)
    path = np.outer(inc.w, s) + inc.a[:, :q] @ cos[:q] + inc.b[:, :q] @ sin[:q]
    dt = np.full((1, n_grid - 1), inc.delta / (n_grid - 1))
    return np.vstack([dt, np.diff(path, axis=1)])


def _integrate(values: np.ndarray, dx: np.ndarray) -> np.ndarray:
    """Running trapezoidal integral, zero at the left end."""
    mid = 0.5 * (values[..., :-1] + values[..., 1:]) * dx
    return np.concatenate([np.zeros(mid.shape[:-1] + (1,)), np.cumsum(mid, axis=-1)], axis=-1)


def iterated_integral(increments: np.ndarray, word: tuple[int, ...]) -> float:
    """
    Stratonovich integral J_word of the path; letter 0 is time, letter j + 1 channel j.

    The first letter of the word is the innermost integration.
    """
    running = np.ones(increments.shape[1] + 1)
    for letter in word:
        running = _integrate(running, increments[letter])
    return float(running[-1])


def drift_noise_triple_integrals(increments: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    All J_{0 j i} and J_{j 0 i} over noise channels i, j, indexed [j, i].
    """
    dt, dw = increments[0], increments[1:]
    time = _integrate(np.ones(dt.shape[0] + 1), dt)
    path = _integrate(np.ones((dw.shape[0], dt.shape[0] + 1)), dw)

    time_noise = _integrate(np.broadcast_to(time, path.shape), dw)
    noise_time = _integrate(path, dt)

    def mid(v):
        return 0.5 * (v[:, :-1] + v[:, 1:])

    return mid(time_noise) @ dw.T, mid(noise_time) @ dw.T
