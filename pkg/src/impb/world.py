"""Simulated 3-joint planar arm with vertical motion and its objects.

The arm lives in the [-1, 1]^3 cube.  It can grab a pen (which draws on a
slightly elastic floor and breaks if pushed too hard) and two joysticks
driving a video-game character.  Touching a second object while holding one
breaks both.  Everything is deterministic: executing the same policy twice
produces the same trace.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dmp import DmpConfig, PolicyParams, PrimitiveParams, integrate_primitive
from .spaces import Outcome

LINK_LENGTH = 0.33

PEN = "pen"
JOY1 = "joy1"
JOY2 = "joy2"
GRAB_ORDER = (PEN, JOY1, JOY2)  # tie-break order for simultaneous grabs


@dataclass(frozen=True)
class WorldConfig:
    dmp: DmpConfig = field(default_factory=DmpConfig)
    grab_radius: float = 0.1
    floor_z: float = -0.2
    pen_break_z: float = -0.3
    arm_init_angles: tuple = (0.0, 0.0, 0.0)
    arm_init_z: float = 0.5
    pen_home: tuple = (0.6, 0.0, 0.5)
    joy1_home: tuple = (-0.5, 0.4, 0.3)
    joy2_home: tuple = (0.5, 0.4, 0.3)
    joy_box_side: float = 0.4


def forward_kinematics(angles, z: float, floor_z: float = -0.2) -> np.ndarray:
    """Tip position of the 3-link planar arm at height z (floor-clamped)."""
    a = np.cumsum(np.asarray(angles, dtype=float))
    x = LINK_LENGTH * np.sum(np.cos(a))
    y = LINK_LENGTH * np.sum(np.sin(a))
    return np.array([x, y, max(z, floor_z)])


@dataclass
class WorldState:
    angles: np.ndarray
    z: float  # commanded arm height
    tip: np.ndarray
    pen: np.ndarray
    pen_ok: bool
    joy1: np.ndarray
    joy2: np.ndarray
    held: str | None
    broken: set
    drawing: np.ndarray | None  # (xa, ya, xb, yb) of the last finished line
    segment: list  # (x, y) contact points of the line being drawn
    char: np.ndarray
    char_moved: bool


@dataclass(frozen=True)
class EpisodeTrace:
    """Executed policy plus the outcomes observable after each primitive."""

    policy: PolicyParams
    outcomes: tuple  # outcomes[k] = tuple of Outcome after primitive k+1


def reset(cfg: WorldConfig) -> WorldState:
    angles = np.asarray(cfg.arm_init_angles, dtype=float)
    return WorldState(
        angles=angles.copy(),
        z=cfg.arm_init_z,
        tip=forward_kinematics(angles, cfg.arm_init_z, cfg.floor_z),
        pen=np.asarray(cfg.pen_home, dtype=float).copy(),
        pen_ok=True,
        joy1=np.asarray(cfg.joy1_home, dtype=float).copy(),
        joy2=np.asarray(cfg.joy2_home, dtype=float).copy(),
        held=None,
        broken=set(),
        drawing=None,
        segment=[],
        char=np.zeros(2),
        char_moved=False,
    )


def _object_pos(state: WorldState, name: str) -> np.ndarray:
    return {PEN: state.pen, JOY1: state.joy1, JOY2: state.joy2}[name]


def _in_box(pos, home, side: float) -> bool:
    half = side / 2.0
    return bool(np.all(np.abs(pos - np.asarray(home)) <= half))


def _normalized_joy(pos, home, side: float) -> np.ndarray:
    return (pos - np.asarray(home)) / (side / 2.0)


def step_primitive(
    state: WorldState, prim: PrimitiveParams, cfg: WorldConfig
) -> WorldState:
    """Advance the world through one primitive (mutates and returns state).

    The arm follows the DMP trajectory sample by sample; grabbing, breakage,
    drawing and (at the last sample only) the character update are applied
    at every sample in a fixed order.
    """
    traj = integrate_primitive(prim, state.angles, state.z, cfg.dmp)
    commanded_z = prim.z
    last = len(traj) - 1
    for k, row in enumerate(traj):
        tip = forward_kinematics(row[:3], commanded_z, cfg.floor_z)
        state.tip = tip

        # Grab: nearest unbroken object within reach, fixed tie-break order.
        if state.held is None:
            best = None
            best_d = cfg.grab_radius
            for name in GRAB_ORDER:
                if name in state.broken:
                    continue
                d = float(np.linalg.norm(tip - _object_pos(state, name)))
                if d < best_d or (best is None and d <= best_d):
                    best, best_d = name, d
            if best is not None:
                state.held = best

        # Held object follows the tip; a joystick leaving its box goes home.
        if state.held == PEN:
            state.pen = tip.copy()
        elif state.held == JOY1:
            if _in_box(tip, cfg.joy1_home, cfg.joy_box_side):
                state.joy1 = tip.copy()
            else:
                state.joy1 = np.asarray(cfg.joy1_home, dtype=float).copy()
                state.held = None
        elif state.held == JOY2:
            if _in_box(tip, cfg.joy2_home, cfg.joy_box_side):
                state.joy2 = tip.copy()
            else:
                state.joy2 = np.asarray(cfg.joy2_home, dtype=float).copy()
                state.held = None

        # Touching a second object breaks both and releases the held one.
        if state.held is not None:
            for name in GRAB_ORDER:
                if name == state.held or name in state.broken:
                    continue
                if np.linalg.norm(tip - _object_pos(state, name)) <= cfg.grab_radius:
                    state.broken.add(state.held)
                    state.broken.add(name)
                    if state.held == PEN or name == PEN:
                        state.pen_ok = False
                    state.held = None
                    break

        # Forcing the pen below the elastic floor limit breaks it.
        if state.held == PEN and commanded_z <= cfg.pen_break_z:
            state.broken.add(PEN)
            state.pen_ok = False
            state.held = None

        # Drawing: pen held, working and on the floor.
        contact = state.held == PEN and state.pen_ok and state.pen[2] <= 0.0
        if contact:
            state.segment.append((state.pen[0], state.pen[1]))
        elif state.segment:
            if len(state.segment) >= 2:
                xa, ya = state.segment[0]
                xb, yb = state.segment[-1]
                state.drawing = np.array([xa, ya, xb, yb])
            state.segment = []

        # Character refreshes only when the primitive ends.
        if k == last:
            new_char = state.char.copy()
            if state.held == JOY1:
                new_char[0] = _normalized_joy(
                    state.joy1, cfg.joy1_home, cfg.joy_box_side
                )[0]
            elif state.held == JOY2:
                new_char[1] = _normalized_joy(
                    state.joy2, cfg.joy2_home, cfg.joy_box_side
                )[1]
            if not np.array_equal(new_char, state.char):
                state.char_moved = True
            state.char = new_char

    state.angles = traj[-1, :3].copy()
    state.z = commanded_z
    return state


def extract_outcomes(state: WorldState, cfg: WorldConfig) -> tuple:
    """Outcomes currently observable, per the availability rules."""
    out = [Outcome(0, state.tip.copy())]
    if state.held == PEN and state.pen_ok:
        out.append(Outcome(1, state.pen.copy()))
    if state.drawing is not None and state.pen_ok:
        out.append(Outcome(2, state.drawing.copy()))
    if state.held == JOY1:
        out.append(Outcome(3, _normalized_joy(state.joy1, cfg.joy1_home, cfg.joy_box_side)))
    if state.held == JOY2:
        out.append(Outcome(4, _normalized_joy(state.joy2, cfg.joy2_home, cfg.joy_box_side)))
    if state.char_moved:
        out.append(Outcome(5, state.char.copy()))
    return tuple(out)


def execute_policy(policy: PolicyParams, cfg: WorldConfig) -> EpisodeTrace:
    """Reset, run every primitive and record outcomes after each of them."""
    state = reset(cfg)
    per_prefix = []
    for prim in policy.primitives:
        step_primitive(state, prim, cfg)
        per_prefix.append(extract_outcomes(state, cfg))
    return EpisodeTrace(policy=policy, outcomes=tuple(per_prefix))
