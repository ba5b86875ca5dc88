"""Episodic memory: a log of executed policies and their reached outcomes.

The memory doubles as the inverse model: ``nearest_outcome`` answers plain
nearest-neighbour queries (used for procedure refinement and competence),
while ``best_policy_for`` minimizes the length-penalized performance
d(w, goal) * gamma^n and is what the learner exploits.

Entries are grouped per (task space, policy size); each group keeps a
cKDTree over the outcomes it has seen, rebuilt lazily, with a brute-force
tail for fresh entries.  All ties resolve to the earliest-inserted entry so
that indexed queries match a brute-force scan exactly.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .dmp import PolicyParams
from .spaces import N_SPACES, Outcome, diameter
from .world import EpisodeTrace

# Groups below this size are scanned linearly; above it a tree is built.
_BRUTE_THRESHOLD = 64


@dataclass(frozen=True)
class PerfConfig:
    gamma: float = 1.2  # length penalty base, > 1

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1")


def normalized_distance(a: Outcome, b: Outcome) -> float:
    """Euclidean distance divided by the space diameter; in [0, 1]."""
    if a.space != b.space:
        raise ValueError(f"cannot compare spaces {a.space} and {b.space}")
    return float(np.linalg.norm(a.coords - b.coords)) / diameter(a.space)


@dataclass(frozen=True)
class MemoryEntry:
    policy: PolicyParams
    outcome: Outcome
    prefix: int  # number of primitives in the stored (prefix) policy
    procedure: object  # Procedure or None
    index: int  # global insertion order


def performance(entry: MemoryEntry, goal: Outcome, cfg: PerfConfig) -> float:
    """Eq-style metric d(w, goal) * gamma^n; lower is better."""
    return normalized_distance(entry.outcome, goal) * cfg.gamma**entry.prefix


class _Group:
    """Entries of one (space, size) bucket with a lazily rebuilt tree."""

    def __init__(self, dim):
        self.dim = dim
        self.coords = []
        self.entries = []
        self._tree = None
        self._tree_size = 0

    def add(self, entry):
        self.entries.append(entry)
        self.coords.append(entry.outcome.coords)

    def _refresh(self):
        n = len(self.coords)
        if n >= _BRUTE_THRESHOLD and n > self._tree_size * 1.25:
            self._tree = cKDTree(np.asarray(self.coords))
            self._tree_size = n

    def nearest(self, point: np.ndarray):
        """(distance, entry) of the nearest outcome, earliest entry on ties."""
        self._refresh()
        point = np.asarray(point, dtype=float)
        candidates = None
        if self._tree is not None:
            d, _ = self._tree.query(point)
            # Re-rank every candidate within a tolerance ball with the same
            # arithmetic the brute-force oracle uses, so ties and last-ulp
            # differences resolve identically.
            r = d * (1.0 + 1e-9) + 1e-12
            idx = self._tree.query_ball_point(point, r)
            candidates = list(idx)
            tail = range(self._tree_size, len(self.coords))
        else:
            tail = range(len(self.coords))
        best_d, best_i = np.inf, None
        if candidates:
            arr = np.asarray([self.coords[i] for i in candidates])
            dists = np.linalg.norm(arr - point, axis=1)
            for d, i in sorted(zip(dists, candidates), key=lambda t: (t[0], t[1])):
                best_d, best_i = float(d), i
                break
        for i in tail:
            d = float(np.linalg.norm(self.coords[i] - point))
            if d < best_d:
                best_d, best_i = d, i
        if best_i is None:
            return None
        return best_d, self.entries[best_i]


class Memory:
    """Append-only episodic memory with per-space nearest-neighbour search."""

    def __init__(self, perf_cfg: PerfConfig = PerfConfig()):
        self.perf_cfg = perf_cfg
        self.entries = []
        self._groups = [dict() for _ in range(N_SPACES)]

    def __len__(self):
        return len(self.entries)

    def add(self, policy: PolicyParams, outcome: Outcome, procedure=None) -> MemoryEntry:
        entry = MemoryEntry(
            policy=policy,
            outcome=outcome,
            prefix=policy.size,
            procedure=procedure,
            index=len(self.entries),
        )
        self.entries.append(entry)
        groups = self._groups[outcome.space]
        group = groups.get(policy.size)
        if group is None:
            group = groups[policy.size] = _Group(outcome.coords.size)
        group.add(entry)
        return entry

    def record(self, trace: EpisodeTrace, procedure=None):
        """Store one entry per (prefix, outcome); the procedure annotation
        attaches to full-policy entries only."""
        n = trace.policy.size
        for k, outcomes in enumerate(trace.outcomes, start=1):
            prefix_policy = trace.policy if k == n else trace.policy.prefix(k)
            proc = procedure if k == n else None
            for outcome in outcomes:
                self.add(prefix_policy, outcome, proc)

    def count(self, space: int) -> int:
        return sum(len(g.entries) for g in self._groups[space].values())

    def entries_for(self, space: int, size: int | None = None):
        """Entries indexed under one space, optionally one policy size."""
        groups = self._groups[space]
        if size is not None:
            group = groups.get(size)
            return [] if group is None else list(group.entries)
        return [e for g in groups.values() for e in g.entries]

    def nearest_outcome(self, goal: Outcome):
        """Entry whose outcome minimizes plain normalized distance, or None."""
        best = None
        for group in self._groups[goal.space].values():
            hit = group.nearest(goal.coords)
            if hit is None:
                continue
            d, entry = hit
            key = (d, entry.index)
            if best is None or key < best[0]:
                best = (key, entry)
        return None if best is None else best[1]

    def best_policy_for(self, goal: Outcome):
        """Entry minimizing d * gamma^size: the exploited inverse model."""
        diam = diameter(goal.space)
        best = None
        for size, group in self._groups[goal.space].items():
            hit = group.nearest(goal.coords)
            if hit is None:
                continue
            d, entry = hit
            key = (d / diam * self.perf_cfg.gamma**size, entry.index)
            if best is None or key < best[0]:
                best = (key, entry)
        return None if best is None else best[1]

    def nearest_distances(self, space: int, points) -> np.ndarray:
        """Distance from each query point to its nearest outcome in the
        space (plain Euclidean, batched; used by the evaluation harness)."""
        points = np.asarray(points, dtype=float)
        best = np.full(len(points), np.inf)
        for group in self._groups[space].values():
            group._refresh()
            if group._tree is not None:
                d, _ = group._tree.query(points)
                best = np.minimum(best, d)
                tail = group.coords[group._tree_size :]
            else:
                tail = group.coords
            if tail:
                arr = np.asarray(tail)
                d = cdist(points, arr).min(axis=1)
                best = np.minimum(best, d)
        return best

    def dump(self, path):
        """Line-delimited records for post-hoc analysis."""
        with open(path, "w") as fh:
            for e in self.entries:
                rec = {
                    "policy": e.policy.flat().tolist(),
                    "space": e.outcome.space,
                    "outcome": e.outcome.coords.tolist(),
                    "prefix": e.prefix,
                    "procedure": None
                    if e.procedure is None
                    else {
                        "space_i": e.procedure.first.space,
                        "coords_i": e.procedure.first.coords.tolist(),
                        "space_j": e.procedure.second.space,
                        "coords_j": e.procedure.second.coords.tolist(),
                    },
                }
                fh.write(json.dumps(rec) + "\n")

    @classmethod
    def load(cls, path, perf_cfg: PerfConfig = PerfConfig()) -> "Memory":
        from .procedures import Procedure

        mem = cls(perf_cfg)
        with open(path) as fh:
            for line in fh:
                rec = json.loads(line)
                proc = None
                if rec["procedure"] is not None:
                    p = rec["procedure"]
                    proc = Procedure(
                        Outcome(p["space_i"], np.asarray(p["coords_i"])),
                        Outcome(p["space_j"], np.asarray(p["coords_j"])),
                    )
                mem.add(
                    PolicyParams.from_flat(rec["policy"]),
                    Outcome(rec["space"], np.asarray(rec["outcome"])),
                    proc,
                )
        return mem
