"""Procedures: ordered pairs of target outcomes refined into 2-part policies.

A procedure (ti, tj) is executed by looking up, for each subtask, the
nearest outcome the learner has actually reached, concatenating the two
policies that produced them, and running the result.  The refined pair
(t1, t2) is what gets recorded, not the raw targets.
"""

from dataclasses import dataclass

import numpy as np

from .dmp import PolicyParams, concat
from .memory import Memory
from .spaces import N_SPACES, Outcome, uniform_outcome


@dataclass(frozen=True)
class Procedure:
    first: Outcome
    second: Outcome


def random_procedure(rng: np.random.Generator) -> Procedure:
    """Two subtasks drawn uniformly over the whole (bounded) outcome space."""
    si = int(rng.integers(N_SPACES))
    sj = int(rng.integers(N_SPACES))
    return Procedure(uniform_outcome(si, rng), uniform_outcome(sj, rng))


def refine_and_build(proc: Procedure, memory: Memory):
    """Replace each subtask by the nearest reached outcome and build the
    concatenated policy.  Returns (policy, refined procedure), or None when
    either subtask's space has no data yet (caller falls back to policy
    exploration)."""
    e1 = memory.nearest_outcome(proc.first)
    e2 = memory.nearest_outcome(proc.second)
    if e1 is None or e2 is None:
        return None
    policy = concat(e1.policy, e2.policy)
    return policy, Procedure(e1.outcome, e2.outcome)


def _proc_vector(proc: Procedure) -> np.ndarray:
    return np.concatenate([proc.first.coords, proc.second.coords])


def _clip_procedure(vec, si, sj, di) -> Procedure:
    vec = np.clip(vec, -1.0, 1.0)
    return Procedure(Outcome(si, vec[:di]), Outcome(sj, vec[di:]))


def local_procedure_optimization(
    goal: Outcome,
    memory: Memory,
    rng: np.random.Generator,
    k_local: int = 10,
    sigma: float = 0.05,
) -> Procedure | None:
    """Propose a procedure for the goal by local linear regression.

    Takes the k_local procedure-annotated entries nearest the goal, keeps
    the modal (space_i, space_j) pair among them, fits a least-squares map
    from concatenated subtask coordinates to outcome coordinates, and steps
    the best neighbour's procedure through the pseudo-inverse toward the
    goal residual.  Gaussian noise escapes degenerate fits.  Falls back to
    perturbing the single best annotated entry when neighbours are scarce;
    returns None when no annotated entry exists in the goal's space.
    """
    annotated = [
        e
        for e in memory.entries
        if e.procedure is not None and e.outcome.space == goal.space
    ]
    if not annotated:
        return None
    annotated.sort(
        key=lambda e: (np.linalg.norm(e.outcome.coords - goal.coords), e.index)
    )
    neighbours = annotated[:k_local]

    # Regression only makes sense within one (space_i, space_j) pair;
    # keep the modal pair, first-seen winning ties.
    pairs = {}
    for e in neighbours:
        key = (e.procedure.first.space, e.procedure.second.space)
        pairs.setdefault(key, []).append(e)
    modal_key = max(pairs, key=lambda k: len(pairs[k]))
    group = pairs[modal_key]
    anchor = group[0]
    si = anchor.procedure.first.space
    sj = anchor.procedure.second.space
    di = anchor.procedure.first.coords.size
    base = _proc_vector(anchor.procedure)

    if len(group) < 3:
        return _clip_procedure(base + rng.normal(0.0, sigma, base.size), si, sj, di)

    X = np.asarray([_proc_vector(e.procedure) for e in group])
    Y = np.asarray([e.outcome.coords for e in group])
    Xc = X - X.mean(axis=0)
    Yc = Y - Y.mean(axis=0)
    try:
        J, *_ = np.linalg.lstsq(Xc, Yc, rcond=None)
        residual = goal.coords - anchor.outcome.coords
        step = np.linalg.pinv(J.T) @ residual
    except np.linalg.LinAlgError:
        step = np.zeros(base.size)
    if not np.all(np.isfinite(step)):
        step = np.zeros(base.size)
    vec = base + step + rng.normal(0.0, sigma, base.size)
    return _clip_procedure(vec, si, sj, di)
