"""Single-joint drive, friction, and integration.

The model per joint (1 DOF, effective inertia ``m``):

    m * q_ddot = tau_drive + f_ext + f_friction

* drive (restoring PD with position-dependent stiffness):
    ``tau_drive = K(q) * (q_target(q) - q) + D * (target_velocity - q_dot)``
* friction, with breakaway threshold ``B = mu_s * |tau_drive| + coulomb_floor``:
    - at rest and ``|f_ext| <= B``: friction cancels the external effort
      (``-f_ext``), regime Static — the joint stays put;
    - at rest and ``|f_ext| > B``: friction saturates at ``-B * sign(f_ext)``,
      regime Kinetic — breakaway;
    - moving: viscous ``-D * q_dot`` (the drive's damping coefficient doubles
      as the kinetic coefficient), regime Kinetic.

Integration is semi-implicit Euler at a fixed dt (velocity first, then
position with the new velocity), with hard limit clamping (velocity zeroed at
a bound) and a stiction latch: while the regime is Static the state does not
move at all, and the regime is re-evaluated every step. Everything here is
pure float arithmetic in a fixed order, so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

from .assets import ConstantStiffness, FixedTarget, JointSpec, StiffnessProfile, TargetPolicy
from .errors import NonPositiveDtError

DT_MAX = 0.01  # stability guard for the explicit part of the stepper


class Regime(str, Enum):
    STATIC = "static"
    KINETIC = "kinetic"


@dataclass(slots=True)
class JointState:
    """Mutable-by-replacement snapshot of one joint.

    ``held_target`` is the latch-policy hysteresis memory: the target evaluated
    on the previous step (or written by a SetFixedTarget effect). ``regime``
    is the friction regime that produced this state.
    """

    q: float
    q_dot: float = 0.0
    s_open: bool = False
    regime: Regime = Regime.STATIC
    held_target: float = 0.0


@dataclass(frozen=True)
class EffortBreakdown:
    """Per-step effort decomposition; ``net`` is summed in the fixed order
    ``(tau_drive + f_ext) + f_friction``."""

    tau_drive: float
    f_ext: float
    f_friction: float
    net: float


def stiffness_at(profile: StiffnessProfile, q: float, s_open: bool, bounds: tuple[float, float]) -> float:
    """Drive stiffness at position ``q`` (clamped to be non-negative).

    For a schedule with offsets measured from the lower bound ``lo``:
    ``k_high`` at ``q <= lo``; on ``(lo, q_threshold]`` either the open-branch
    linear fall-off ``k_high - alpha * (q - lo)`` or the closed-branch surge
    ``k_low + k_max * exp(-lambda_ * (q - lo))``; ``k_low`` past the
    threshold.
    """
    if isinstance(profile, ConstantStiffness):
        k = profile.k
    else:
        lo = bounds[0]
        if q <= lo:
            k = profile.k_high
        elif q <= profile.q_threshold:
            if s_open:
                k = profile.k_high - profile.alpha * (q - lo)
            else:
                k = profile.k_low + profile.k_max * math.exp(-profile.lambda_ * (q - lo))
        else:
            k = profile.k_low
    return k if k > 0.0 else 0.0


def target_at(
    policy: TargetPolicy,
    q: float,
    s_open: bool,
    prev_target: float,
    bounds: tuple[float, float],
) -> float:
    """Drive target at the current state.

    Fixed policies ignore everything and return their target. Latch policies
    target the upper bound once past ``q_threshold`` while open, the lower
    bound once below it while closed, and otherwise hold ``prev_target``
    (hysteresis in the two mixed quadrants).
    """
    if isinstance(policy, FixedTarget):
        return policy.q_target
    if s_open:
        if q > policy.q_threshold:
            return bounds[1]
    elif q < policy.q_threshold:
        return bounds[0]
    return prev_target


def _drive_terms(spec: JointSpec, state: JointState) -> tuple[float, float, float]:
    """(K, q_target, tau_drive) at the current state — the single place the
    drive formula lives."""
    bounds = (spec.q_lower_bound, spec.q_upper_bound)
    k = stiffness_at(spec.stiffness, state.q, state.s_open, bounds)
    q_target = target_at(spec.target_policy, state.q, state.s_open, state.held_target, bounds)
    tau = k * (q_target - state.q) + spec.damping_D * (spec.target_velocity - state.q_dot)
    return k, q_target, tau


def drive_effort(spec: JointSpec, state: JointState) -> float:
    """``K(q) * (q_target - q) + D * (target_velocity - q_dot)``."""
    return _drive_terms(spec, state)[2]


def friction_effort(
    spec: JointSpec, state: JointState, tau_drive: float, f_ext: float
) -> tuple[float, Regime]:
    """Friction effort and regime for the current instant (see module doc)."""
    if state.q_dot == 0.0:
        breakaway = spec.mu_s * abs(tau_drive) + spec.coulomb_floor
        if abs(f_ext) <= breakaway:
            return -f_ext, Regime.STATIC
        return (-breakaway if f_ext > 0.0 else breakaway), Regime.KINETIC
    return -spec.damping_D * state.q_dot, Regime.KINETIC


def effort_breakdown(spec: JointSpec, state: JointState, f_ext: float) -> tuple[EffortBreakdown, Regime]:
    tau = _drive_terms(spec, state)[2]
    f_friction, regime = friction_effort(spec, state, tau, f_ext)
    return EffortBreakdown(tau_drive=tau, f_ext=f_ext, f_friction=f_friction, net=(tau + f_ext) + f_friction), regime


def _check_dt(dt: float) -> None:
    if dt <= 0.0:
        raise NonPositiveDtError(f"dt must be > 0, got {dt}")
    if dt > DT_MAX:
        raise ValueError(f"dt={dt} exceeds the stability guard {DT_MAX}")


def step(spec: JointSpec, state: JointState, f_ext: float, dt: float) -> JointState:
    """Advance one fixed timestep.

    Static regime freezes the joint exactly (q and q_dot unchanged, velocity
    exactly zero); otherwise semi-implicit Euler, then limit clamping with
    the velocity zeroed at a bound. The newly evaluated drive target becomes
    the next ``held_target``.
    """
    _check_dt(dt)
    _, q_target, tau = _drive_terms(spec, state)
    f_friction, regime = friction_effort(spec, state, tau, f_ext)
    if regime is Regime.STATIC:
        return JointState(
            q=state.q, q_dot=0.0, s_open=state.s_open, regime=regime, held_target=q_target
        )
    net = (tau + f_ext) + f_friction
    q_dot = state.q_dot + dt * net / spec.effective_inertia
    q = state.q + dt * q_dot
    if q <= spec.q_lower_bound:
        q, q_dot = spec.q_lower_bound, 0.0
    elif q >= spec.q_upper_bound:
        q, q_dot = spec.q_upper_bound, 0.0
    return JointState(q=q, q_dot=q_dot, s_open=state.s_open, regime=regime, held_target=q_target)


def initial_state(spec: JointSpec, q: float = 0.0, q_dot: float = 0.0, s_open: bool = False) -> JointState:
    """A rest-consistent state at ``q``: regime Static iff motionless, held
    target seeded by evaluating the target policy with ``prev_target = q``."""
    if not (spec.q_lower_bound <= q <= spec.q_upper_bound):
        raise ValueError(
            f"initial q={q} outside limits [{spec.q_lower_bound}, {spec.q_upper_bound}] of joint '{spec.id}'"
        )
    held = target_at(spec.target_policy, q, s_open, q, (spec.q_lower_bound, spec.q_upper_bound))
    return JointState(
        q=q,
        q_dot=q_dot,
        s_open=s_open,
        regime=Regime.STATIC if q_dot == 0.0 else Regime.KINETIC,
        held_target=held,
    )


def steps_for(duration: float, dt: float) -> int:
    """Number of integration steps covering ``duration`` (ceil, with a guard
    against float fuzz in the quotient)."""
    if duration <= 0.0:
        raise ValueError(f"duration must be > 0, got {duration}")
    return max(1, math.ceil(duration / dt - 1e-9))


def simulate_joint(
    spec: JointSpec,
    force_schedule: Callable[[float], float],
    duration: float,
    dt: float,
    state0: "JointState | None" = None,
) -> list[JointState]:
    """Repeatedly :func:`step` one joint for ``duration`` seconds.

    ``force_schedule(t)`` is sampled at the start of each step. Returns the
    state series including the initial state: ``steps_for(duration, dt) + 1``
    entries, sample ``k`` at ``t = k * dt``.
    """
    _check_dt(dt)
    n = steps_for(duration, dt)
    state = state0 if state0 is not None else initial_state(spec, q=min(max(0.0, spec.q_lower_bound), spec.q_upper_bound))
    series = [state]
    for k in range(n):
        state = step(spec, state, force_schedule(k * dt), dt)
        series.append(state)
    return series


def positions(series: Iterable[JointState]) -> list[float]:
    return [s.q for s in series]


def velocities(series: Iterable[JointState]) -> list[float]:
    return [s.q_dot for s in series]
