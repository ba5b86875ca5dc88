"""Intrinsically motivated procedure babbling on a simulated planar arm."""

from .dmp import DmpConfig, PolicyParams, PrimitiveParams, concat
from .memory import Memory, MemoryEntry, PerfConfig, normalized_distance, performance
from .procedures import Procedure, random_procedure, refine_and_build
from .spaces import N_SPACES, SPACE_DIMS, Outcome
from .world import EpisodeTrace, WorldConfig, execute_policy, forward_kinematics

__all__ = [
    "DmpConfig",
    "PolicyParams",
    "PrimitiveParams",
    "concat",
    "Memory",
    "MemoryEntry",
    "PerfConfig",
    "normalized_distance",
    "performance",
    "Procedure",
    "random_procedure",
    "refine_and_build",
    "N_SPACES",
    "SPACE_DIMS",
    "Outcome",
    "EpisodeTrace",
    "WorldConfig",
    "execute_policy",
    "forward_kinematics",
]
