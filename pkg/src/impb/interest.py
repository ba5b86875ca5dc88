"""Progress-based interest model over region-partitioned task spaces.

Each task space starts as a single region and is recursively split once a
region accumulates more than ``n_split`` attempts.  Competence is the
negated normalized distance between a goal and what was actually reached;
progress is a windowed difference of competence; interest divides the
absolute progress by the cost of the strategy that produced it.  Goal and
strategy selection mixes exploitation of the most interesting
(region, strategy) pair with interest-proportional and fully random
sampling.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .memory import normalized_distance
from .spaces import N_SPACES, SPACE_DIMS, Outcome


class Strategy(enum.IntEnum):
    POLICY = 0
    PROCEDURE = 1


@dataclass(frozen=True)
class InterestConfig:
    n_split: int = 50
    n_min: int = 10
    window: int = 20
    n_quantiles: int = 10  # candidate cuts per dimension when splitting
    p_exploit: float = 0.7
    p_region: float = 0.2
    p_random: float = 0.1
    cost_policy: float = 1.0
    cost_procedure: float = 1.0

    def cost(self, strategy: Strategy) -> float:
        return self.cost_policy if strategy == Strategy.POLICY else self.cost_procedure


def competence(goal: Outcome, reached: Outcome) -> float:
    """-normalized_distance(reached, goal); 0 is perfect, -1 is worst."""
    return -normalized_distance(reached, goal)


@dataclass
class Attempt:
    coords: np.ndarray
    competence: float
    strategy: Strategy
    episode: int
    targeted: bool  # False for outcomes reached while aiming elsewhere


@dataclass
class Region:
    space: int
    lo: np.ndarray
    hi: np.ndarray
    attempts: list = field(default_factory=list)


class _Node:
    """Binary split tree over one task space; leaves carry the regions."""

    __slots__ = ("region", "dim", "cut", "left", "right")

    def __init__(self, region):
        self.region = region
        self.dim = None
        self.cut = None
        self.left = None
        self.right = None

    def leaf_for(self, coords):
        node = self
        while node.region is None:
            node = node.left if coords[node.dim] < node.cut else node.right
        return node

    def leaves(self):
        if self.region is not None:
            yield self
        else:
            yield from self.left.leaves()
            yield from self.right.leaves()


def _half_means(values):
    m = len(values)
    if m < 2:
        return None
    half = m // 2
    older = values[:half]
    newer = values[m - half :]
    return float(np.mean(newer) - np.mean(older))


def region_progress(region: Region, window: int, strategy: Strategy | None = None) -> float:
    """Windowed competence derivative over goal-targeted attempts."""
    comps = [
        a.competence
        for a in region.attempts
        if a.targeted and (strategy is None or a.strategy == strategy)
    ]
    diff = _half_means(comps[-window:])
    return 0.0 if diff is None else diff


class InterestModel:
    def __init__(self, cfg: InterestConfig, strategies=tuple(Strategy)):
        self.cfg = cfg
        self.strategies = tuple(strategies)
        self._roots = [
            _Node(
                Region(
                    space=s,
                    lo=-np.ones(SPACE_DIMS[s]),
                    hi=np.ones(SPACE_DIMS[s]),
                )
            )
            for s in range(N_SPACES)
        ]
        self.update_count = 0

    # -- bookkeeping ------------------------------------------------------

    def space_regions(self, space: int):
        return [leaf.region for leaf in self._roots[space].leaves()]

    def region_of(self, space: int, coords) -> Region:
        return self._roots[space].leaf_for(np.asarray(coords, dtype=float)).region

    def interest(self, region: Region, strategy: Strategy) -> float:
        return abs(region_progress(region, self.cfg.window, strategy)) / self.cfg.cost(
            strategy
        )

    def update(
        self,
        goal: Outcome,
        comp: float,
        strategy: Strategy,
        reached: tuple,
        episode: int,
    ):
        """Add the targeted goal (with its competence) and every reached
        outcome (as a density-only marker) to their regions; split regions
        that grew past the threshold."""
        self.update_count += 1
        self._insert(goal.space, Attempt(goal.coords, comp, strategy, episode, True))
        for outcome in reached:
            self._insert(
                outcome.space,
                Attempt(outcome.coords, 0.0, strategy, episode, False),
            )

    def _insert(self, space: int, attempt: Attempt):
        leaf = self._roots[space].leaf_for(attempt.coords)
        leaf.region.attempts.append(attempt)
        if len(leaf.region.attempts) > self.cfg.n_split:
            self._try_split(leaf)

    # -- region splitting -------------------------------------------------

    def _child_interest(self, attempts) -> float:
        best = 0.0
        for strategy in self.strategies:
            comps = [
                a.competence
                for a in attempts
                if a.targeted and a.strategy == strategy
            ]
            diff = _half_means(comps[-self.cfg.window :])
            if diff is not None:
                best = max(best, abs(diff) / self.cfg.cost(strategy))
        return best

    def _try_split(self, leaf: _Node):
        cfg = self.cfg
        region = leaf.region
        coords = np.asarray([a.coords for a in region.attempts])
        best = None  # (score, dim, cut, left, right)
        for dim in range(coords.shape[1]):
            qs = np.quantile(
                coords[:, dim],
                [j / cfg.n_quantiles for j in range(1, cfg.n_quantiles)],
            )
            for cut in qs:
                if not region.lo[dim] < cut < region.hi[dim]:
                    continue
                left = [a for a in region.attempts if a.coords[dim] < cut]
                right = [a for a in region.attempts if a.coords[dim] >= cut]
                if len(left) < cfg.n_min or len(right) < cfg.n_min:
                    continue
                score = abs(self._child_interest(left) - self._child_interest(right))
                if best is None or score > best[0]:
                    best = (score, dim, float(cut), left, right)
        if best is None:
            return  # no admissible cut (points too clumped): defer
        _, dim, cut, left_attempts, right_attempts = best
        hi_l = region.hi.copy()
        hi_l[dim] = cut
        lo_r = region.lo.copy()
        lo_r[dim] = cut
        leaf.region = None
        leaf.dim = dim
        leaf.cut = cut
        leaf.left = _Node(Region(region.space, region.lo, hi_l, left_attempts))
        leaf.right = _Node(Region(region.space, lo_r, region.hi, right_attempts))
        for child in (leaf.left, leaf.right):
            if len(child.region.attempts) > cfg.n_split:
                self._try_split(child)

    # -- goal/strategy selection ------------------------------------------

    def _pairs(self):
        out = []
        for space in range(N_SPACES):
            for region in self.space_regions(space):
                for strategy in self.strategies:
                    out.append((region, strategy, self.interest(region, strategy)))
        return out

    def _random_choice(self, rng):
        space = int(rng.integers(N_SPACES))
        goal = Outcome(space, rng.uniform(-1.0, 1.0, SPACE_DIMS[space]))
        strategy = self.strategies[int(rng.integers(len(self.strategies)))]
        return goal, strategy

    def select_goal_and_strategy(self, rng: np.random.Generator):
        """Exploit / interest-proportional / random mixture."""
        u = rng.random()
        if u >= self.cfg.p_exploit + self.cfg.p_region:
            return self._random_choice(rng)
        pairs = self._pairs()
        total = sum(p[2] for p in pairs)
        if total <= 0.0:
            return self._random_choice(rng)
        if u < self.cfg.p_exploit:
            region, strategy, _ = max(pairs, key=lambda p: p[2])
        else:
            weights = np.asarray([p[2] for p in pairs]) / total
            region, strategy, _ = pairs[int(rng.choice(len(pairs), p=weights))]
        goal = Outcome(
            region.space, rng.uniform(region.lo, region.hi, SPACE_DIMS[region.space])
        )
        return goal, strategy
