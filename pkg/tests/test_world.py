import numpy as np
import pytest

from impb.dmp import PolicyParams, PrimitiveParams
from impb.spaces import SPACE_DIMS
from impb.world import (
    JOY1,
    PEN,
    WorldConfig,
    execute_policy,
    extract_outcomes,
    forward_kinematics,
    reset,
    step_primitive,
)

CFG = WorldConfig()


def prim(goals=(0, 0, 0), z=0.5, weights=None):
    vals = np.zeros(13)
    vals[:12].reshape(3, 4)[:, 3] = goals
    if weights is not None:
        vals[:12].reshape(3, 4)[:, :3] = weights
    vals[12] = z
    return PrimitiveParams(vals)


# Goal triples (normalized by pi) whose zero-weight DMP trajectories keep the
# tip on the +x axis while folding inward: angles (0, t, -2t) give tip
# (0.33 * (1 + 2 cos t), 0).  Folding to t = pi/2 sweeps x from 0.99 through
# the pen at x = 0.6.
FOLD_TO_PEN = (0.0, 0.5, -1.0)

# Reaching joystick 1's home (-0.5, 0.4, 0.3): rotate the folded arm so the
# tip lands at radius 0.64 under angle atan2(0.4, -0.5).
_JOY_THETA = np.arccos((0.64 / 0.33 - 1.0) / 2.0)
_JOY_PHI = np.arctan2(0.4, -0.5)
FOLD_TO_JOY1 = (_JOY_PHI / np.pi, _JOY_THETA / np.pi, -2 * _JOY_THETA / np.pi)


class TestForwardKinematics:
    def test_straight_arm(self):
        assert np.allclose(forward_kinematics([0, 0, 0], 0.0), [0.99, 0, 0])

    def test_rotated_base(self):
        tip = forward_kinematics([np.pi, 0, 0], 0.5)
        assert np.allclose(tip, [-0.99, 0, 0.5], atol=1e-12)

    def test_folded_elbow(self):
        tip = forward_kinematics([0, np.pi, 0], 0.1)
        assert np.allclose(tip, [-0.33, 0, 0.1], atol=1e-12)

    def test_floor_clamp(self):
        assert forward_kinematics([0, 0, 0], -0.7)[2] == -0.2


class TestReset:
    def test_deterministic(self):
        a, b = reset(CFG), reset(CFG)
        assert np.array_equal(a.angles, b.angles)
        assert np.array_equal(a.pen, b.pen)
        assert a.held is None and b.held is None

    def test_initial_conditions(self):
        s = reset(CFG)
        assert np.array_equal(s.char, [0, 0])
        assert s.pen_ok and s.drawing is None and not s.broken
        outcomes = extract_outcomes(s, CFG)
        assert [o.space for o in outcomes] == [0]


class TestPenInteraction:
    def test_no_interaction_far_from_objects(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=(0.9, 0, 0), z=-0.1), CFG)
        assert s.held is None and not s.broken
        assert np.array_equal(s.pen, CFG.pen_home)

    def test_grab_pen(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        assert s.held == PEN
        assert np.allclose(s.pen, s.tip)
        spaces = [o.space for o in extract_outcomes(s, CFG)]
        assert spaces == [0, 1]

    def test_pen_break_on_deep_push(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=-0.35), CFG)
        assert not s.pen_ok and PEN in s.broken and s.held is None
        assert s.drawing is None  # broke before any contact samples survived
        spaces = [o.space for o in extract_outcomes(s, CFG)]
        assert 1 not in spaces and 2 not in spaces

    def test_drawing_segment(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=-0.1), CFG)
        assert s.drawing is None  # contact still ongoing
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        assert s.drawing is not None
        # The arm only settles residually, so the line is essentially a dot.
        xa, ya, xb, yb = s.drawing
        assert np.hypot(xa - xb, ya - yb) < 1e-3
        assert 2 in [o.space for o in extract_outcomes(s, CFG)]

    def test_drawing_suppressed_after_break(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=-0.1), CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        assert s.drawing is not None
        # Re-grab impossible (still held), force the break now.
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=-0.35), CFG)
        assert 2 not in [o.space for o in extract_outcomes(s, CFG)]


class TestJoystickAndCharacter:
    def test_grab_joystick_home(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_JOY1, z=0.3), CFG)
        assert s.held == JOY1
        out = {o.space: o.coords for o in extract_outcomes(s, CFG)}
        assert 3 in out
        # Tip converges within DMP tolerance of the home: normalized
        # position is near the box center.
        assert np.all(np.abs(out[3]) < 0.2)

    def test_character_moves_after_primitive_end(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_JOY1, z=0.3), CFG)
        # Nudge the base joint: the tip rotates but stays inside the box.
        nudged = (FOLD_TO_JOY1[0] + 0.1 / np.pi, FOLD_TO_JOY1[1], FOLD_TO_JOY1[2])
        step_primitive(s, prim(goals=nudged, z=0.3), CFG)
        assert s.held == JOY1
        out = {o.space: o.coords for o in extract_outcomes(s, CFG)}
        assert 5 in out
        assert s.char_moved
        assert out[5][0] == pytest.approx(out[3][0])

    def test_character_constant_within_primitive(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_JOY1, z=0.3), CFG)
        before = s.char.copy()
        nudged = (FOLD_TO_JOY1[0] + 0.1 / np.pi, FOLD_TO_JOY1[1], FOLD_TO_JOY1[2])
        # The update lands only at the primitive's final sample, so the
        # previous character position survives until then by construction;
        # verify the end-of-primitive refresh actually happened.
        step_primitive(s, prim(goals=nudged, z=0.3), CFG)
        assert not np.array_equal(s.char, before)

    def test_leaving_box_releases_to_home(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_JOY1, z=0.3), CFG)
        assert s.held == JOY1
        step_primitive(s, prim(goals=(0.9, 0.0, 0.0), z=0.3), CFG)
        assert s.held is None
        assert np.allclose(s.joy1, CFG.joy1_home)
        assert JOY1 not in s.broken


class TestBreakage:
    def test_touching_second_object_breaks_both(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        assert s.held == PEN
        # Carry the pen into joystick 1's home position.
        step_primitive(s, prim(goals=FOLD_TO_JOY1, z=0.3), CFG)
        assert s.broken == {PEN, JOY1}
        assert s.held is None and not s.pen_ok

    def test_broken_objects_never_regrabbed(self):
        s = reset(CFG)
        step_primitive(s, prim(goals=FOLD_TO_PEN, z=0.5), CFG)
        step_primitive(s, prim(goals=FOLD_TO_JOY1, z=0.3), CFG)
        broken_joy_pos = s.joy1.copy()
        step_primitive(s, prim(goals=FOLD_TO_JOY1, z=0.3), CFG)
        assert s.held is None
        assert np.array_equal(s.joy1, broken_joy_pos)


class TestExecutePolicy:
    def test_trace_shape(self, rng):
        policy = PolicyParams.from_flat(rng.uniform(-1, 1, 39))
        trace = execute_policy(policy, CFG)
        assert len(trace.outcomes) == 3
        assert all(any(o.space == 0 for o in pref) for pref in trace.outcomes)

    def test_prefix_consistency(self, rng):
        for _ in range(10):
            policy = PolicyParams.from_flat(rng.uniform(-1, 1, 13 * 3))
            trace = execute_policy(policy, CFG)
            for k in (1, 2):
                sub = execute_policy(policy.prefix(k), CFG)
                assert sub.outcomes == trace.outcomes[:k]

    def test_determinism(self, rng):
        policy = PolicyParams.from_flat(rng.uniform(-1, 1, 26))
        a = execute_policy(policy, CFG)
        b = execute_policy(policy, CFG)
        assert a.outcomes == b.outcomes

    def test_floor_invariant(self, rng):
        for _ in range(20):
            size = int(rng.integers(1, 4))
            policy = PolicyParams.from_flat(rng.uniform(-1, 1, 13 * size))
            trace = execute_policy(policy, CFG)
            for pref in trace.outcomes:
                for o in pref:
                    if o.space == 0:
                        assert o.coords[2] >= CFG.floor_z - 1e-12

    def test_outcome_dims(self, rng):
        for _ in range(10):
            policy = PolicyParams.from_flat(rng.uniform(-1, 1, 26))
            trace = execute_policy(policy, CFG)
            for pref in trace.outcomes:
                for o in pref:
                    assert o.coords.shape == (SPACE_DIMS[o.space],)
