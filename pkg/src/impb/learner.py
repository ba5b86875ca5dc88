"""Episodic learners: IM-PB and the three comparison baselines.

Every learner runs the same outer loop (pick something to try, execute one
complex policy, store the trace); they differ in how the policy is chosen:

- RandomPolicy: random policies only.
- Random-PB: fair coin between a random policy and a random procedure.
- SAGG-RIAC: goal babbling with policy-space exploration only.
- IM-PB: goal babbling choosing between policy-space and procedural-space
  exploration, driven by the interest model.
"""

from dataclasses import dataclass, field

import numpy as np

from .dmp import PRIMITIVE_DIM, PolicyParams
from .interest import InterestConfig, InterestModel, Strategy, competence
from .memory import Memory, PerfConfig, normalized_distance
from .procedures import (
    Procedure,
    local_procedure_optimization,
    random_procedure,
    refine_and_build,
)
from .spaces import Outcome
from .world import WorldConfig, execute_policy

VARIANTS = ("IM-PB", "Random-PB", "SAGG-RIAC", "RandomPolicy")


@dataclass(frozen=True)
class LearnerConfig:
    variant: str = "IM-PB"
    episodes: int = 3000
    seed: int = 1
    checkpoint_every: int = 60  # episodes between evaluations
    eps_near: float = 0.1  # switch between random and local exploration
    sigma_policy: float = 0.05
    sigma_procedure: float = 0.05
    k_local: int = 10
    n_max: int = 6
    p_geom: float = 0.5
    world: WorldConfig = field(default_factory=WorldConfig)
    perf: PerfConfig = field(default_factory=PerfConfig)
    interest: InterestConfig = field(default_factory=InterestConfig)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.episodes < 1:
            raise ValueError("episode budget must be >= 1")
        if not 0.0 < self.eps_near < 1.0:
            raise ValueError("eps_near must lie in (0, 1)")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


def random_policy_size(rng: np.random.Generator, p_geom: float, n_max: int) -> int:
    """Geometric size prior truncated to [1, n_max]."""
    weights = np.array([(1.0 - p_geom) ** (k - 1) * p_geom for k in range(1, n_max + 1)])
    weights /= weights.sum()
    return int(rng.choice(np.arange(1, n_max + 1), p=weights))


def random_policy(rng: np.random.Generator, cfg: LearnerConfig) -> PolicyParams:
    size = random_policy_size(rng, cfg.p_geom, cfg.n_max)
    return PolicyParams.from_flat(rng.uniform(-1.0, 1.0, PRIMITIVE_DIM * size))


def propose_policy_local(
    goal: Outcome, memory: Memory, rng: np.random.Generator, cfg: LearnerConfig
) -> PolicyParams:
    """Local optimization step around the best known policy for the goal.

    Fits a linear map theta -> outcome over the nearest same-size entries
    and steps the best policy through the pseudo-inverse toward the goal
    residual; degenerate fits degrade to pure Gaussian perturbation.
    """
    best = memory.best_policy_for(goal)
    theta = best.policy.flat()
    peers = memory.entries_for(goal.space, best.prefix)
    peers.sort(key=lambda e: (np.linalg.norm(e.outcome.coords - goal.coords), e.index))
    peers = peers[: cfg.k_local]
    step = np.zeros(theta.size)
    if len(peers) >= 3:
        X = np.asarray([e.policy.flat() for e in peers])
        Y = np.asarray([e.outcome.coords for e in peers])
        try:
            J, *_ = np.linalg.lstsq(X - X.mean(axis=0), Y - Y.mean(axis=0), rcond=None)
            step = np.linalg.pinv(J.T) @ (goal.coords - best.outcome.coords)
        except np.linalg.LinAlgError:
            step = np.zeros(theta.size)
        if not np.all(np.isfinite(step)):
            step = np.zeros(theta.size)
    new = theta + step + rng.normal(0.0, cfg.sigma_policy, theta.size)
    return PolicyParams.from_flat(np.clip(new, -1.0, 1.0))


def goal_directed_policy_optimization(
    goal: Outcome, memory: Memory, rng: np.random.Generator, cfg: LearnerConfig
):
    """Pick the policy to try for this goal: random exploration when the
    goal is far from anything reached, local optimization otherwise."""
    nearest = memory.nearest_outcome(goal)
    if nearest is None or normalized_distance(nearest.outcome, goal) > cfg.eps_near:
        return random_policy(rng, cfg)
    return propose_policy_local(goal, memory, rng, cfg)


def goal_directed_procedure_optimization(
    goal: Outcome, memory: Memory, rng: np.random.Generator, cfg: LearnerConfig
):
    """Pick a procedure for this goal, refine it (nearest reached outcomes)
    and return (policy, refined_procedure).  Falls back to a random policy
    (procedure None) when the memory cannot refine anything yet."""
    nearest = memory.nearest_outcome(goal)
    if nearest is None or normalized_distance(nearest.outcome, goal) > cfg.eps_near:
        proc = random_procedure(rng)
    else:
        proc = local_procedure_optimization(
            goal, memory, rng, cfg.k_local, cfg.sigma_procedure
        )
        if proc is None:
            proc = random_procedure(rng)
    built = refine_and_build(proc, memory)
    if built is None:
        return random_policy(rng, cfg), None
    return built


def _episode_competence(goal: Outcome, trace) -> float:
    """Competence toward the goal: best outcome reached in the goal's space
    at any prefix; -1 when the space was not reached at all."""
    best = None
    for outcomes in trace.outcomes:
        for outcome in outcomes:
            if outcome.space == goal.space:
                c = competence(goal, outcome)
                if best is None or c > best:
                    best = c
    return -1.0 if best is None else best


def run(cfg: LearnerConfig, benchmark=None, evaluate_fn=None):
    """Run one learner for its episode budget.

    Returns (memory, checkpoint rows); rows are emitted every
    ``checkpoint_every`` episodes (and at the end) when a benchmark and an
    evaluation function are supplied.
    """
    rng = np.random.default_rng(cfg.seed)
    memory = Memory(cfg.perf)

    model = None
    if cfg.variant == "IM-PB":
        model = InterestModel(cfg.interest, (Strategy.POLICY, Strategy.PROCEDURE))
    elif cfg.variant == "SAGG-RIAC":
        model = InterestModel(cfg.interest, (Strategy.POLICY,))

    rows = []
    for episode in range(1, cfg.episodes + 1):
        if model is not None:
            goal, strategy = model.select_goal_and_strategy(rng)
            if strategy == Strategy.PROCEDURE:
                policy, procedure = goal_directed_procedure_optimization(
                    goal, memory, rng, cfg
                )
            else:
                policy = goal_directed_policy_optimization(goal, memory, rng, cfg)
                procedure = None
        elif cfg.variant == "Random-PB":
            goal = None
            if rng.random() < 0.5:
                built = refine_and_build(random_procedure(rng), memory)
                if built is None:
                    policy, procedure = random_policy(rng, cfg), None
                else:
                    policy, procedure = built
            else:
                policy, procedure = random_policy(rng, cfg), None
        else:  # RandomPolicy
            goal = None
            policy, procedure = random_policy(rng, cfg), None

        trace = execute_policy(policy, cfg.world)
        memory.record(trace, procedure)

        if model is not None:
            comp = _episode_competence(goal, trace)
            model.update(goal, comp, strategy, trace.outcomes[-1], episode)

        if (
            benchmark is not None
            and evaluate_fn is not None
            and (episode % cfg.checkpoint_every == 0 or episode == cfg.episodes)
        ):
            per_space, global_err = evaluate_fn(memory, benchmark)
            rows.append((episode, per_space, global_err))

    return memory, rows
