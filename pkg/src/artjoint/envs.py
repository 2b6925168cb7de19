"""Closure-task environment: a point effector interacting with one goal joint.

The reward shapes a reach-and-close task on the goal joint's handle marker:

    r = l1 * exp(-d) + l2 * max(0, cos th) + l3 * r_cls + l4 * ||action||^2

with ``d`` the effector-to-handle distance, ``th`` the angle between the
effector velocity and the direction to the handle, and
``r_cls = (q_upper - q) / (q_upper - q_lower)`` clamped to [0, 1] (1 with the
joint fully closed at its lower bound). Default weights: 0.5, 0.125, 10,
-0.01 — at the handle, fully closed, zero action, the reward is exactly
10.625.

The effector is a unit-mass point integrated semi-implicitly at the scenario
dt. While it sits within ``contact_radius`` of the nearest assembly marker,
its action force also loads every joint on that marker's root path through
the marker Jacobian transpose (a prismatic joint feels the force along its
world axis; a revolute joint the moment about its world anchor). There is no
collision geometry and no reaction force on the effector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ActionOutOfBoundsError
from .geometry import Vec3
from .scenario import Scenario, ScenarioRuntime, _split_ref

_NEAR_ZERO = 1e-9


@dataclass(frozen=True)
class RewardParams:
    lambda1: float = 0.5
    lambda2: float = 0.125
    lambda3: float = 10.0
    lambda4: float = -0.01


@dataclass(frozen=True)
class RewardInputs:
    """Everything the reward reads: effector point state, handle position,
    and the goal joint's position and limits."""

    effector_pos: Vec3
    effector_vel: Vec3
    handle_pos: Vec3
    q: float
    q_lower: float
    q_upper: float


def closure_fraction(q: float, q_lower: float, q_upper: float) -> float:
    frac = (q_upper - q) / (q_upper - q_lower)
    return min(max(frac, 0.0), 1.0)


def reward(inputs: RewardInputs, action, params: RewardParams = RewardParams()) -> float:
    """See the module docstring for the term definitions.

    Conventions at the degenerate points: alignment is 1.0 with the effector
    at the handle (within 1e-9 m), and 0.0 when the effector is motionless
    away from it.
    """
    ax, ay, az = float(action[0]), float(action[1]), float(action[2])
    ex, ey, ez = inputs.effector_pos
    vx, vy, vz = inputs.effector_vel
    hx, hy, hz = inputs.handle_pos

    dx, dy, dz = hx - ex, hy - ey, hz - ez
    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
    r_dst = math.exp(-dist)

    speed = math.sqrt(vx * vx + vy * vy + vz * vz)
    if dist <= _NEAR_ZERO:
        r_dir = 1.0
    elif speed <= _NEAR_ZERO:
        r_dir = 0.0
    else:
        r_dir = max(0.0, (vx * dx + vy * dy + vz * dz) / (speed * dist))

    r_cls = closure_fraction(inputs.q, inputs.q_lower, inputs.q_upper)
    r_smth = ax * ax + ay * ay + az * az
    return (
        params.lambda1 * r_dst
        + params.lambda2 * r_dir
        + params.lambda3 * r_cls
        + params.lambda4 * r_smth
    )


class ManipulationEnv:
    """Deterministic closure task built from a scenario with an ``env`` block.

    ``reset() -> observation``; ``step(action) -> (observation, reward, done)``
    with ``action`` a 3-vector force on the effector, ``|action| <=
    action_max`` (:class:`ActionOutOfBoundsError` otherwise). Done when the
    goal joint is fully closed (``r_cls == 1``) or time exceeds the scenario
    duration. Observation is the 11-vector
    ``[effector pos (3), effector vel (3), q, q_dot, handle pos (3)]``.
    """

    def __init__(self, scenario: Scenario):
        if scenario.env is None:
            raise ValueError("scenario has no env block")
        self.scenario = scenario
        self.config = scenario.env
        self.params = RewardParams(**dict(self.config.reward_weights))
        self._goal = self.config.goal_joint
        goal_spec = None
        for pl in scenario.assemblies:
            name = _split_ref(self._goal)[0]
            if pl.name == name:
                goal_spec = pl.assembly.joint(_split_ref(self._goal)[1])
        if goal_spec is None:  # load_scenario validated this; belt and braces
            raise ValueError(f"goal joint '{self._goal}' not found")
        self._goal_spec = goal_spec
        self._markers: list[str] = []
        for pl in scenario.assemblies:
            self._markers.extend(f"{pl.name}/{m.name}" for m in pl.assembly.markers())
        self.runtime: ScenarioRuntime | None = None
        self.effector_pos = np.zeros(3)
        self.effector_vel = np.zeros(3)

    # -- plumbing -----------------------------------------------------------

    def _observation(self) -> np.ndarray:
        state = self.runtime.states[self._goal]
        handle = self.runtime.marker_position(self.config.handle_marker)
        return np.array(
            [*self.effector_pos, *self.effector_vel, state.q, state.q_dot, *handle], dtype=float
        )

    def _nearest_marker(self) -> tuple[str, float]:
        best_ref, best_d2 = "", math.inf
        ex, ey, ez = self.effector_pos
        for ref in self._markers:
            mx, my, mz = self.runtime.marker_position(ref)
            d2 = (mx - ex) ** 2 + (my - ey) ** 2 + (mz - ez) ** 2
            if d2 < best_d2:
                best_ref, best_d2 = ref, d2
        return best_ref, math.sqrt(best_d2) if best_d2 < math.inf else math.inf

    # -- API ----------------------------------------------------------------

    def reset(self) -> np.ndarray:
        """Rebuild the initial state; deterministic (no seeding to do)."""
        self.runtime = ScenarioRuntime(self.scenario)
        self.effector_pos = np.array(self.config.effector_start, dtype=float)
        self.effector_vel = np.zeros(3)
        return self._observation()

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        if self.runtime is None:
            raise RuntimeError("call reset() before step()")
        action = np.asarray(action, dtype=float)
        if action.shape != (3,):
            raise ActionOutOfBoundsError(f"action must be a 3-vector, got shape {action.shape}")
        magnitude = float(np.linalg.norm(action))
        if not np.all(np.isfinite(action)) or magnitude > self.config.action_max:
            raise ActionOutOfBoundsError(
                f"|action|={magnitude:.6g} exceeds action_max={self.config.action_max}"
            )

        # Contact coupling: the action loads the nearest in-radius marker.
        extra: dict[str, float] = {}
        ref, dist = self._nearest_marker()
        if ref and dist <= self.config.contact_radius:
            for joint_ref, column in self.runtime.marker_jacobian(ref).items():
                extra[joint_ref] = (
                    column[0] * action[0] + column[1] * action[1] + column[2] * action[2]
                )

        self.runtime.tick(extra)
        dt = self.scenario.dt
        self.effector_vel = self.effector_vel + dt * action  # unit mass
        self.effector_pos = self.effector_pos + dt * self.effector_vel

        state = self.runtime.states[self._goal]
        handle = self.runtime.marker_position(self.config.handle_marker)
        inputs = RewardInputs(
            effector_pos=tuple(self.effector_pos),
            effector_vel=tuple(self.effector_vel),
            handle_pos=handle,
            q=state.q,
            q_lower=self._goal_spec.q_lower_bound,
            q_upper=self._goal_spec.q_upper_bound,
        )
        value = reward(inputs, action, self.params)
        closed = closure_fraction(state.q, self._goal_spec.q_lower_bound, self._goal_spec.q_upper_bound) == 1.0
        done = closed or self.runtime.t > self.scenario.duration
        return self._observation(), value, done


def env_reset(env: ManipulationEnv) -> np.ndarray:
    """Functional alias for :meth:`ManipulationEnv.reset`."""
    return env.reset()


def env_step(env: ManipulationEnv, action) -> tuple[np.ndarray, float, bool]:
    """Functional alias for :meth:`ManipulationEnv.step`."""
    return env.step(action)
