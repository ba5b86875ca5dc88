import numpy as np
import pytest
from scipy.integrate import solve_ivp

from impb.dmp import (
    DmpConfig,
    PolicyParams,
    PrimitiveParams,
    concat,
    execute_policy_kinematics,
    integrate_primitive,
)

# Constants from the worked convergence example (weaker spring than the
# package defaults, still critically damped).
EXAMPLE_CFG = DmpConfig(spring=100.0, damping=20.0, alpha=5.0)


def prim(weights=None, goals=None, z=0.0):
    vals = np.zeros(13)
    vals[12] = z
    if weights is not None:
        vals[:12].reshape(3, 4)[:, :3] = weights
    if goals is not None:
        vals[:12].reshape(3, 4)[:, 3] = goals
    return PrimitiveParams(np.clip(vals, -1, 1))


def oracle_trajectory(params, start, cfg, t_eval):
    """Independent RK45 integration of the transformed second-order system."""
    goals = params.goals * cfg.joint_limit
    centers = np.exp(-cfg.alpha * np.asarray(cfg.basis_times))
    diffs = np.diff(centers)
    widths = np.empty(3)
    widths[:-1] = 1.0 / (2.0 * diffs**2)
    widths[-1] = widths[-2]
    w = params.weights * cfg.weight_scale

    def rhs(t, y):
        x, v = y[:3], y[3:6]
        s = np.exp(-cfg.alpha * t / cfg.tau)
        psi = np.exp(-widths * (s - centers) ** 2)
        f = (w @ psi) * s / psi.sum()
        acc = cfg.spring * (goals - x) - cfg.damping * v + (goals - start) * f
        return np.concatenate([v / cfg.tau, acc / cfg.tau])

    sol = solve_ivp(
        rhs,
        (0.0, cfg.tau),
        np.concatenate([start, np.zeros(3)]),
        t_eval=t_eval,
        rtol=1e-8,
        atol=1e-10,
    )
    return sol.y[:3].T


class TestPrimitiveParams:
    def test_valid_construction(self):
        p = PrimitiveParams(np.linspace(-1, 1, 13))
        assert p.values.shape == (13,)

    def test_out_of_range_rejected(self):
        vals = np.zeros(13)
        vals[4] = 1.5
        with pytest.raises(ValueError):
            PrimitiveParams(vals)

    def test_non_finite_rejected(self):
        vals = np.zeros(13)
        vals[0] = np.nan
        with pytest.raises(ValueError):
            PrimitiveParams(vals)

    def test_flattening_order(self):
        vals = np.arange(13) / 13.0
        p = PrimitiveParams(vals)
        assert np.array_equal(p.weights[1], vals[4:7])
        assert p.goals[2] == vals[11]
        assert p.z == vals[12]


class TestIntegratePrimitive:
    def test_fixed_point(self):
        # Zero weights, goals equal to the start: nothing moves.
        start = np.array([np.pi / 2, -np.pi / 4, 0.1])
        p = prim(goals=start / np.pi, z=0.3)
        traj = integrate_primitive(p, start, 0.0, DmpConfig())
        assert np.allclose(traj[:, :3], start, atol=1e-12)
        assert np.all(traj[:, 3] == 0.3)

    def test_convergence_example(self):
        # Frozen example: g(0)=0.5 -> pi/2, zero weights, start 0.
        p = prim(goals=[0.5, 0.0, 0.0])
        traj = integrate_primitive(p, np.zeros(3), 0.0, EXAMPLE_CFG)
        assert abs(traj[-1, 0] - np.pi / 2) < 1e-2
        # Critically damped from rest: monotone, no overshoot.
        assert np.all(np.diff(traj[:, 0]) >= -1e-12)
        assert np.all(traj[:, 0] <= np.pi / 2 + 1e-9)

    def test_forced_convergence(self, rng):
        for _ in range(50):
            p = PrimitiveParams(rng.uniform(-1, 1, 13))
            traj = integrate_primitive(p, np.zeros(3), 0.0, DmpConfig())
            assert np.all(np.abs(traj[-1, :3] - p.goals * np.pi) < 1e-2)

    def test_matches_independent_integrator(self, rng):
        cfg = DmpConfig()
        t_eval = np.arange(cfg.steps + 1) * cfg.dt
        for _ in range(5):
            p = PrimitiveParams(rng.uniform(-1, 1, 13))
            start = rng.uniform(-np.pi, np.pi, 3)
            traj = integrate_primitive(p, start, 0.0, cfg)
            ref = oracle_trajectory(p, start, cfg, t_eval)
            # Explicit Euler tracks the reference loosely through the fast
            # transient but must land on the same settled state.
            assert np.max(np.abs(traj[:, :3] - ref)) < 0.2
            assert np.max(np.abs(traj[-1, :3] - ref[-1])) < 2e-3

    def test_rejects_non_finite_start(self):
        with pytest.raises(ValueError):
            integrate_primitive(prim(), np.array([np.inf, 0, 0]), 0.0, DmpConfig())

    def test_phase_positive_and_decreasing(self):
        s = DmpConfig().phase()
        assert np.all(s > 0)
        assert np.all(np.diff(s) < 0)

    def test_deterministic(self, rng):
        p = PrimitiveParams(rng.uniform(-1, 1, 13))
        a = integrate_primitive(p, np.zeros(3), 0.0, DmpConfig())
        b = integrate_primitive(p, np.zeros(3), 0.0, DmpConfig())
        assert np.array_equal(a, b)


class TestExecutePolicy:
    def test_single_primitive_identity(self, rng):
        p = PrimitiveParams(rng.uniform(-1, 1, 13))
        policy = PolicyParams((p,))
        a = execute_policy_kinematics(policy, np.zeros(3), 0.0, DmpConfig())
        b = integrate_primitive(p, np.zeros(3), 0.0, DmpConfig())
        assert np.array_equal(a, b)

    def test_stationary_second_primitive(self):
        goals = np.array([0.3, -0.2, 0.1])
        first = prim(goals=goals, z=0.2)
        second = prim(goals=goals, z=0.2)
        cfg = DmpConfig()
        traj = execute_policy_kinematics(
            PolicyParams((first, second)), np.zeros(3), 0.0, cfg
        )
        tail = traj[cfg.steps :, :3]
        # The first segment ends within DMP tolerance of the goals; the
        # second segment converges onto them exactly (fixed point pull).
        assert np.max(np.abs(tail - tail[-1])) < 1e-2

    def test_chain_continuity_and_length(self, rng):
        cfg = DmpConfig()
        policy = PolicyParams(
            tuple(PrimitiveParams(rng.uniform(-1, 1, 13)) for _ in range(3))
        )
        traj = execute_policy_kinematics(policy, np.zeros(3), 0.0, cfg)
        assert traj.shape == (3 * cfg.steps + 1, 4)
        for k in (1, 2):
            seg = integrate_primitive(
                policy.primitives[k], traj[k * cfg.steps, :3], 0.0, cfg
            )
            # Joins are exact: segment k+1 starts from segment k's end state.
            assert np.array_equal(seg[0, :3], traj[k * cfg.steps, :3])


class TestConcat:
    def test_sizes(self, rng):
        p = PolicyParams.from_flat(rng.uniform(-1, 1, 13))
        q = PolicyParams.from_flat(rng.uniform(-1, 1, 13))
        assert concat(p, q).size == 2

    def test_flat_order(self, rng):
        p = PolicyParams.from_flat(rng.uniform(-1, 1, 26))
        q = PolicyParams.from_flat(rng.uniform(-1, 1, 39))
        r = concat(p, q)
        assert r.size == 5
        assert r.flat().size == 65
        assert np.array_equal(r.flat(), np.concatenate([p.flat(), q.flat()]))

    def test_associative(self, rng):
        p, q, r = (PolicyParams.from_flat(rng.uniform(-1, 1, 13)) for _ in range(3))
        assert np.array_equal(
            concat(concat(p, q), r).flat(), concat(p, concat(q, r)).flat()
        )

    def test_empty_policy_rejected(self):
        with pytest.raises(ValueError):
            PolicyParams(())


def test_config_requires_integer_steps():
    with pytest.raises(ValueError):
        DmpConfig(tau=1.0, dt=0.03)
