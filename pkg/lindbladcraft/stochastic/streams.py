from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence


@dataclass(slots=True, frozen=True)
class StreamKey:
    master_seed: int
    repeat: int = 0
    trajectory: int = 0

    def as_tuple(self) -> tuple[int, int, int]:
        return self.master_seed, self.repeat, self.trajectory


@dataclass(slots=True)
class TrajectoryStreams:
    """Independent generators of one trajectory: Wiener increments, initial state, shot noise."""

    increments: Generator
    initial: Generator
    shots: Generator


def trajectory_seed(key: StreamKey) -> SeedSequence:
    return SeedSequence(key.master_seed, spawn_key=(key.repeat, key.trajectory))


def trajectory_streams(key: StreamKey) -> TrajectoryStreams:
    """
    Counter-based streams keyed by (master seed, repeat, trajectory).

    Draws depend only on the key, never on which worker runs the trajectory or in what order.
    """
    increments, initial, shots = trajectory_seed(key).spawn(3)
    return TrajectoryStreams(
        increments=Generator(Philox(increments)),
        initial=Generator(Philox(initial)),
        shots=Generator(Philox(shots)),
    )


def trajectory_stream(master_seed: int, repeat: int = 0, trajectory: int = 0) -> np.random.Generator:
    """Increment generator of one trajectory."""
    return trajectory_streams(StreamKey(master_seed, repeat, trajectory)).increments
