"""Task space definitions shared by the simulation, memory and learners.

Six outcome spaces: arm tip pose, pen pose, drawing endpoints, the two
joystick poses and the video-game character pose.  Every coordinate is
normalized to [-1, 1].
"""

import math
from dataclasses import dataclass

import numpy as np

SPACE_DIMS = (3, 3, 4, 3, 3, 2)
N_SPACES = len(SPACE_DIMS)


def diameter(space: int) -> float:
    """Diagonal of the [-1, 1]^dim box, used to normalize distances."""
    return 2.0 * math.sqrt(SPACE_DIMS[space])


@dataclass(frozen=True)
class Outcome:
    """A point in one task space, tagged with the space it belongs to."""

    space: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if self.space not in range(N_SPACES):
            raise ValueError(f"unknown task space {self.space}")
        if coords.shape != (SPACE_DIMS[self.space],):
            raise ValueError(
                f"space {self.space} expects dim {SPACE_DIMS[self.space]}, "
                f"got shape {coords.shape}"
            )
        if not np.all(np.isfinite(coords)):
            raise ValueError("outcome coordinates must be finite")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def __eq__(self, other):
        return (
            isinstance(other, Outcome)
            and self.space == other.space
            and np.array_equal(self.coords, other.coords)
        )

    def __hash__(self):
        return hash((self.space, self.coords.tobytes()))


def uniform_outcome(space: int, rng: np.random.Generator) -> Outcome:
    """Uniform random point in a task space's bounding box."""
    return Outcome(space, rng.uniform(-1.0, 1.0, SPACE_DIMS[space]))
