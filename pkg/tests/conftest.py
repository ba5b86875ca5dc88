"""Shared helpers: brute-force oracles the indexed code must agree with."""

import numpy as np
import pytest

from impb.dmp import PRIMITIVE_DIM, PolicyParams
from impb.memory import Memory, PerfConfig
from impb.spaces import SPACE_DIMS, Outcome


def brute_nearest(memory, goal):
    """Linear scan, plain distance, earliest entry on ties."""
    best = None
    for e in memory.entries:
        if e.outcome.space != goal.space:
            continue
        key = (float(np.linalg.norm(e.outcome.coords - goal.coords)), e.index)
        if best is None or key < best[0]:
            best = (key, e)
    return None if best is None else best[1]


def brute_best(memory, goal, gamma):
    """Linear scan under the length-penalized metric."""
    from impb.memory import performance

    cfg = PerfConfig(gamma=gamma)
    best = None
    for e in memory.entries:
        if e.outcome.space != goal.space:
            continue
        key = (performance(e, goal, cfg), e.index)
        if best is None or key < best[0]:
            best = (key, e)
    return None if best is None else best[1]


def random_policy_params(rng, size=None, n_max=5):
    if size is None:
        size = int(rng.integers(1, n_max + 1))
    return PolicyParams.from_flat(rng.uniform(-1.0, 1.0, PRIMITIVE_DIM * size))


def fill_memory(rng, n_entries, spaces=range(6), perf=PerfConfig()):
    """Memory populated with synthetic entries (random policies/outcomes)."""
    memory = Memory(perf)
    spaces = list(spaces)
    for _ in range(n_entries):
        space = spaces[int(rng.integers(len(spaces)))]
        memory.add(
            random_policy_params(rng),
            Outcome(space, rng.uniform(-1.0, 1.0, SPACE_DIMS[space])),
        )
    return memory


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
