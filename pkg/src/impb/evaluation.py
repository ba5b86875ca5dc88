"""Benchmark generation, error curves and the policy-size analysis.

The benchmark is a regular Cartesian grid per task space (desk scale: 100
points per space, 600 total; full scale: 27,600 points).  Evaluation is
the mean normalized distance from each benchmark point to its nearest
reached outcome; spaces with no data yet score the full diameter (1.0) so
early checkpoints remain plottable.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .memory import Memory
from .spaces import N_SPACES, SPACE_DIMS, Outcome, diameter

# Per-dimension grid sizes for each space.  Desk scale gives 100 points per
# space; full scale follows the closest regular-grid construction to the
# published 27,600 total, padded with seeded random points in space 2.
DESK_GRIDS = {
    0: (5, 5, 4),
    1: (5, 5, 4),
    2: (5, 5, 2, 2),
    3: (5, 5, 4),
    4: (5, 5, 4),
    5: (10, 10),
}
FULL_GRIDS = {
    0: (14, 14, 14),
    1: (14, 14, 14),
    2: (9, 9, 9, 9),
    3: (14, 14, 14),
    4: (14, 14, 14),
    5: (100, 100),
}
FULL_TOTAL = 27600


@dataclass(frozen=True)
class Benchmark:
    points: tuple  # points[space] is an (N, dim) array

    @property
    def total(self) -> int:
        return sum(len(p) for p in self.points)


def _grid(sizes) -> np.ndarray:
    axes = [np.linspace(-1.0, 1.0, n) for n in sizes]
    return np.asarray(list(itertools.product(*axes)))


def generate_benchmark(scale: str = "desk", seed: int = 0) -> Benchmark:
    if scale == "desk":
        grids = DESK_GRIDS
    elif scale == "full":
        grids = FULL_GRIDS
    else:
        raise ValueError(f"unknown benchmark scale {scale!r}")
    points = [_grid(grids[s]) for s in range(N_SPACES)]
    if scale == "full":
        pad = FULL_TOTAL - sum(len(p) for p in points)
        rng = np.random.default_rng(seed)
        extra = rng.uniform(-1.0, 1.0, (pad, SPACE_DIMS[2]))
        points[2] = np.vstack([points[2], extra])
    return Benchmark(points=tuple(points))


def evaluate(memory: Memory, benchmark: Benchmark):
    """(per-space mean error, global mean error) over all benchmark points."""
    per_space = []
    total_err = 0.0
    total_n = 0
    for space in range(N_SPACES):
        pts = benchmark.points[space]
        if len(pts) == 0:
            per_space.append(0.0)
            continue
        if memory.count(space) == 0:
            errs = np.ones(len(pts))
        else:
            errs = memory.nearest_distances(space, pts) / diameter(space)
        per_space.append(float(errs.mean()))
        total_err += float(errs.sum())
        total_n += len(pts)
    return per_space, total_err / total_n


def policy_size_histogram(
    memory: Memory, space: int, n_queries: int, rng: np.random.Generator
) -> dict:
    """Counts of the policy size selected (under the length-penalized
    metric) for uniformly drawn goals in one space."""
    counts = {}
    if memory.count(space) == 0 or n_queries == 0:
        return counts
    for _ in range(n_queries):
        goal = Outcome(space, rng.uniform(-1.0, 1.0, SPACE_DIMS[space]))
        entry = memory.best_policy_for(goal)
        counts[entry.prefix] = counts.get(entry.prefix, 0) + 1
    return counts
