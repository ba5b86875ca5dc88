"""Dynamic movement primitives for the three arm joints.

Each joint runs a one-dimensional critically damped DMP with three Gaussian
basis functions shaping the forcing term.  A primitive is 13 normalized
scalars: per joint (w0, w1, w2, g) plus one fixed vertical position z.
Complex policies are plain concatenations of primitives, executed
sequentially with each primitive starting where the previous one ended.
"""

import math
from dataclasses import dataclass, field

import numpy as np

PRIMITIVE_DIM = 13
N_JOINTS = 3
N_BASIS = 3


@dataclass(frozen=True)
class DmpConfig:
    spring: float = 200.0
    damping: float | None = None  # defaults to critical damping 2*sqrt(K)
    alpha: float = 8.0
    tau: float = 1.0
    dt: float = 0.01
    weight_scale: float = 20.0
    basis_times: tuple = (0.25, 0.5, 0.75)
    joint_limit: float = math.pi  # [-1,1] goal maps to [-limit, limit]

    def __post_init__(self):
        if self.damping is None:
            object.__setattr__(self, "damping", 2.0 * math.sqrt(self.spring))
        steps = self.tau / self.dt
        if self.dt <= 0 or abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise ValueError("tau/dt must be a positive integer")

    @property
    def steps(self) -> int:
        return int(round(self.tau / self.dt))

    def phase(self) -> np.ndarray:
        """Phase variable s at every integration step (strictly decreasing)."""
        t = np.arange(self.steps + 1) * self.dt
        return np.exp(-self.alpha * t / self.tau)

    def basis_matrix(self) -> np.ndarray:
        """(N_BASIS, steps+1) matrix mapping scaled weights to the forcing
        term at each step: f_k = w . B[:, k]."""
        centers = np.exp(-self.alpha * np.asarray(self.basis_times))
        diffs = np.diff(centers)
        widths = np.empty(N_BASIS)
        widths[:-1] = 1.0 / (2.0 * diffs**2)
        widths[-1] = widths[-2]
        s = self.phase()
        psi = np.exp(-widths[:, None] * (s[None, :] - centers[:, None]) ** 2)
        return psi * s[None, :] / psi.sum(axis=0, keepdims=True)


@dataclass(frozen=True)
class PrimitiveParams:
    """One 13-parameter primitive; all components constrained to [-1, 1].

    Flattening order is (a0, a1, a2, z) with a_i = (w0, w1, w2, g) for
    joint i from base to tip.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (PRIMITIVE_DIM,):
            raise ValueError(f"expected {PRIMITIVE_DIM} parameters, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("primitive parameters must be finite")
        if np.any(np.abs(values) > 1.0):
            raise ValueError("primitive parameters must lie in [-1, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def weights(self) -> np.ndarray:
        """(N_JOINTS, N_BASIS) forcing weights, still normalized."""
        return self.values[:12].reshape(N_JOINTS, 4)[:, :3]

    @property
    def goals(self) -> np.ndarray:
        """Normalized end joint angles."""
        return self.values[:12].reshape(N_JOINTS, 4)[:, 3]

    @property
    def z(self) -> float:
        return float(self.values[12])


@dataclass(frozen=True)
class PolicyParams:
    """An ordered sequence of primitives forming one complex policy."""

    primitives: tuple

    def __post_init__(self):
        prims = tuple(self.primitives)
        if len(prims) < 1:
            raise ValueError("a policy needs at least one primitive")
        if not all(isinstance(p, PrimitiveParams) for p in prims):
            raise TypeError("policy elements must be PrimitiveParams")
        object.__setattr__(self, "primitives", prims)

    @property
    def size(self) -> int:
        return len(self.primitives)

    def flat(self) -> np.ndarray:
        return np.concatenate([p.values for p in self.primitives])

    def prefix(self, k: int) -> "PolicyParams":
        if not 1 <= k <= self.size:
            raise ValueError("prefix length out of range")
        return PolicyParams(self.primitives[:k])

    @classmethod
    def from_flat(cls, flat) -> "PolicyParams":
        flat = np.asarray(flat, dtype=float)
        if flat.size == 0 or flat.size % PRIMITIVE_DIM:
            raise ValueError("flat length must be a positive multiple of 13")
        return cls(
            tuple(
                PrimitiveParams(flat[i : i + PRIMITIVE_DIM])
                for i in range(0, flat.size, PRIMITIVE_DIM)
            )
        )


def concat(p: PolicyParams, q: PolicyParams) -> PolicyParams:
    return PolicyParams(p.primitives + q.primitives)


def integrate_primitive(
    params: PrimitiveParams,
    start_angles,
    start_z: float,
    cfg: DmpConfig,
) -> np.ndarray:
    """Integrate one primitive from the given joint angles.

    Returns an array of shape (steps+1, 4): three joint angles (radians)
    followed by the commanded vertical position, which is held constant at
    the primitive's own z for the whole motion (start_z only describes the
    pose the arm leaves).
    """
    start = np.asarray(start_angles, dtype=float)
    if start.shape != (N_JOINTS,) or not np.all(np.isfinite(start)):
        raise ValueError("start angles must be 3 finite radians")
    if not np.isfinite(start_z):
        raise ValueError("start z must be finite")

    goals = params.goals * cfg.joint_limit
    # Forcing term per joint precomputed over the (state-independent) phase.
    basis = cfg.basis_matrix()
    forcing = (params.weights * cfg.weight_scale) @ basis  # (joints, steps+1)

    traj = np.empty((cfg.steps + 1, 4))
    traj[:, 3] = params.z
    x = start.copy()
    v = np.zeros(N_JOINTS)
    traj[0, :3] = x
    scale = cfg.dt / cfg.tau
    amp = goals - start
    for k in range(cfg.steps):
        acc = cfg.spring * (goals - x) - cfg.damping * v + amp * forcing[:, k]
        v = v + scale * acc
        x = x + scale * v
        traj[k + 1, :3] = x
    return traj


def execute_policy_kinematics(
    policy: PolicyParams, initial_angles, initial_z: float, cfg: DmpConfig
) -> np.ndarray:
    """Chain primitives; each starts from the previous one's final angles.

    Returns (n*steps + 1, 4) samples; the first row is the initial pose.
    """
    angles = np.asarray(initial_angles, dtype=float)
    segments = []
    z = initial_z
    for i, prim in enumerate(policy.primitives):
        seg = integrate_primitive(prim, angles, z, cfg)
        angles = seg[-1, :3]
        z = prim.z
        segments.append(seg if i == 0 else seg[1:])
    return np.vstack(segments)
