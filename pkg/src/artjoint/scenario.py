"""Scenarios: placed assemblies, external force schedules, and the run loop.

A scenario file (``.scenario.json``) names the assets to place, the forces to
apply to joints over time, what to record, and optionally initial joint
states and an environment block. Everything is addressed by qualified refs:
``"<assembly>/<joint>"`` or ``"<assembly>/<marker>"``.

Per tick, in this order: sample the force schedules, step every joint,
evaluate behavior rules against the (previous, new) states, apply the fired
effects, then record. Runs are seedless and bit-deterministic: the same
scenario always yields the same bytes when exported.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from . import assets as assets_mod
from . import behaviors as bh
from . import dynamics
from .assets import Assembly, JointSpec, _as_bool, _as_float, _as_str, _as_vec, _check_keys, _parse_pose, _require_dict, _require_list
from .errors import AssetSyntaxError, NonPositiveDtError, UnknownJointError
from .geometry import Pose, Vec3
from .kinematics import find_marker, forward_kinematics
from .trajectory import Trajectory

# --------------------------------------------------------------------------
# force schedules


@dataclass(frozen=True)
class ConstantForce:
    """``value`` on ``[t_start, t_end)``, zero outside."""

    value: float
    t_start: float = 0.0
    t_end: float = math.inf

    def value_at(self, t: float) -> float:
        return self.value if self.t_start <= t < self.t_end else 0.0


@dataclass(frozen=True)
class PiecewiseForce:
    """Zero-order hold over ``steps`` of (time, value): the latest step at or
    before ``t`` applies; zero before the first; the last value holds on."""

    steps: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.steps]
        if not self.steps:
            raise ValueError("piecewise profile needs at least one step")
        if ts != sorted(ts) or len(set(ts)) != len(ts):
            raise ValueError("piecewise step times must be strictly increasing")

    def value_at(self, t: float) -> float:
        idx = bisect.bisect_right([s[0] for s in self.steps], t) - 1
        return self.steps[idx][1] if idx >= 0 else 0.0


ForceProfile = Union[ConstantForce, PiecewiseForce]


@dataclass(frozen=True)
class ForceSchedule:
    joint: str  # qualified "assembly/joint"
    profile: ForceProfile


# --------------------------------------------------------------------------
# scenario model


@dataclass(frozen=True)
class Placement:
    name: str
    assembly: Assembly
    world_pose: Pose = Pose()
    asset_path: str = ""


@dataclass(frozen=True)
class JointInit:
    q: float
    q_dot: float = 0.0
    s_open: bool = False


@dataclass(frozen=True)
class EnvConfig:
    """Environment block: goal joint, its handle marker, and the point-agent
    effector parameters. ``reward_weights`` optionally overrides the default
    reward weights by name (lambda1..lambda4)."""

    goal_joint: str
    handle_marker: str
    effector_start: Vec3
    action_max: float = 10.0
    contact_radius: float = 0.05
    reward_weights: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    assemblies: tuple[Placement, ...]
    duration: float
    dt: float = 0.001
    forces: tuple[ForceSchedule, ...] = ()
    recordings: tuple[str, ...] = ()
    initial: Mapping[str, JointInit] = field(default_factory=dict)
    env: "EnvConfig | None" = None


def _split_ref(ref: str) -> tuple[str, str]:
    if "/" not in ref:
        raise UnknownJointError(f"reference '{ref}' must look like '<assembly>/<joint-or-marker>'")
    name, local = ref.split("/", 1)
    return name, local


# --------------------------------------------------------------------------
# loading


def _parse_profile(data, loc: str) -> ForceProfile:
    pdata = _require_dict(data, loc)
    kind = _as_str(pdata.get("type", ""), f"{loc}.type")
    if kind == "constant":
        _check_keys(pdata, ("type", "value"), ("t_start", "t_end"), loc)
        return ConstantForce(
            value=_as_float(pdata["value"], f"{loc}.value"),
            t_start=_as_float(pdata["t_start"], f"{loc}.t_start") if "t_start" in pdata else 0.0,
            t_end=_as_float(pdata["t_end"], f"{loc}.t_end") if "t_end" in pdata else math.inf,
        )
    if kind == "piecewise":
        _check_keys(pdata, ("type", "steps"), (), loc)
        parsed: list[tuple[float, float]] = []
        for i, s in enumerate(_require_list(pdata["steps"], f"{loc}.steps")):
            pair = _require_list(s, f"{loc}.steps[{i}]")
            if len(pair) != 2:
                raise AssetSyntaxError("each step must be a [time, value] pair", f"{loc}.steps[{i}]")
            parsed.append(
                (_as_float(pair[0], f"{loc}.steps[{i}][0]"), _as_float(pair[1], f"{loc}.steps[{i}][1]"))
            )
        try:
            return PiecewiseForce(steps=tuple(parsed))
        except ValueError as exc:
            raise AssetSyntaxError(str(exc), f"{loc}.steps") from None
    raise AssetSyntaxError(f"unknown force profile type '{kind}'", loc)


def load_scenario(path: "str | Path") -> Scenario:
    """Load and cross-validate a ``.scenario.json`` file.

    Asset paths resolve relative to the scenario file. Raises
    :class:`AssetSyntaxError` for shape problems, the asset errors for broken
    assets, and UnknownJoint/UnknownMarker for dangling references.
    """
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"), parse_constant=assets_mod._reject_constant)
    except json.JSONDecodeError as exc:
        raise AssetSyntaxError(str(exc), str(p)) from exc
    root = _require_dict(data, str(p))
    _check_keys(
        root,
        ("assemblies", "duration"),
        ("dt", "forces", "recordings", "initial", "env"),
        str(p),
    )

    placements: list[Placement] = []
    seen = set()
    for i, entry in enumerate(_require_list(root["assemblies"], "assemblies")):
        loc = f"assemblies[{i}]"
        pdata = _require_dict(entry, loc)
        _check_keys(pdata, ("asset",), ("name", "world_pose"), loc)
        asset_rel = _as_str(pdata["asset"], f"{loc}.asset")
        asset_path = Path(asset_rel)
        if not asset_path.is_absolute():
            asset_path = p.parent / asset_path
        assembly = assets_mod.parse_asset(asset_path)
        name = _as_str(pdata["name"], f"{loc}.name") if "name" in pdata else assembly.id
        if "/" in name or not name:
            raise AssetSyntaxError(f"assembly name '{name}' must be non-empty and slash-free", f"{loc}.name")
        if name in seen:
            raise AssetSyntaxError(f"duplicate assembly name '{name}'", f"{loc}.name")
        seen.add(name)
        world_pose = _parse_pose(pdata["world_pose"], f"{loc}.world_pose") if "world_pose" in pdata else Pose()
        placements.append(Placement(name=name, assembly=assembly, world_pose=world_pose, asset_path=str(asset_path)))

    duration = _as_float(root["duration"], "duration")
    if duration <= 0:
        raise AssetSyntaxError(f"duration must be > 0, got {duration}", "duration")
    dt = _as_float(root.get("dt", 0.001), "dt")
    if dt <= 0:
        raise NonPositiveDtError(f"scenario dt must be > 0, got {dt}")
    if dt > dynamics.DT_MAX:
        raise AssetSyntaxError(f"dt={dt} exceeds the stability guard {dynamics.DT_MAX}", "dt")

    forces: list[ForceSchedule] = []
    for i, entry in enumerate(_require_list(root.get("forces", []), "forces")):
        loc = f"forces[{i}]"
        fdata = _require_dict(entry, loc)
        _check_keys(fdata, ("joint", "profile"), (), loc)
        forces.append(
            ForceSchedule(
                joint=_as_str(fdata["joint"], f"{loc}.joint"),
                profile=_parse_profile(fdata["profile"], f"{loc}.profile"),
            )
        )

    recordings = tuple(
        _as_str(r, f"recordings[{i}]") for i, r in enumerate(_require_list(root.get("recordings", []), "recordings"))
    )

    initial: dict[str, JointInit] = {}
    for ref, entry in _require_dict(root.get("initial", {}), "initial").items():
        loc = f"initial['{ref}']"
        idata = _require_dict(entry, loc)
        _check_keys(idata, ("q",), ("q_dot", "s_open"), loc)
        initial[ref] = JointInit(
            q=_as_float(idata["q"], f"{loc}.q"),
            q_dot=_as_float(idata["q_dot"], f"{loc}.q_dot") if "q_dot" in idata else 0.0,
            s_open=_as_bool(idata["s_open"], f"{loc}.s_open") if "s_open" in idata else False,
        )

    env = None
    if "env" in root:
        loc = "env"
        edata = _require_dict(root["env"], loc)
        _check_keys(
            edata,
            ("goal_joint", "handle_marker", "effector_start"),
            ("action_max", "contact_radius", "reward_weights"),
            loc,
        )
        weights = {}
        for key, value in _require_dict(edata.get("reward_weights", {}), f"{loc}.reward_weights").items():
            if key not in ("lambda1", "lambda2", "lambda3", "lambda4"):
                raise AssetSyntaxError(f"unknown reward weight '{key}'", f"{loc}.reward_weights")
            weights[key] = _as_float(value, f"{loc}.reward_weights.{key}")
        env = EnvConfig(
            goal_joint=_as_str(edata["goal_joint"], f"{loc}.goal_joint"),
            handle_marker=_as_str(edata["handle_marker"], f"{loc}.handle_marker"),
            effector_start=_as_vec(edata["effector_start"], 3, f"{loc}.effector_start"),
            action_max=_as_float(edata["action_max"], f"{loc}.action_max") if "action_max" in edata else 10.0,
            contact_radius=_as_float(edata["contact_radius"], f"{loc}.contact_radius") if "contact_radius" in edata else 0.05,
            reward_weights=weights,
        )
        if env.action_max <= 0 or env.contact_radius <= 0:
            raise AssetSyntaxError("action_max and contact_radius must be > 0", loc)

    scenario = Scenario(
        assemblies=tuple(placements),
        duration=duration,
        dt=dt,
        forces=tuple(forces),
        recordings=recordings,
        initial=initial,
        env=env,
    )
    _resolve_refs(scenario)  # fail fast on dangling references
    return scenario


def _resolve_refs(scenario: Scenario) -> None:
    by_name = {pl.name: pl for pl in scenario.assemblies}

    def placement_of(ref: str) -> Placement:
        name, _ = _split_ref(ref)
        if name not in by_name:
            raise UnknownJointError(f"reference '{ref}' names unknown assembly '{name}'")
        return by_name[name]

    def resolve_joint(ref: str) -> JointSpec:
        pl = placement_of(ref)
        _, local = _split_ref(ref)
        for j in pl.assembly.joints:
            if j.id == local:
                return j
        raise UnknownJointError(f"assembly '{pl.name}' has no joint '{local}' (reference '{ref}')")

    for schedule in scenario.forces:
        resolve_joint(schedule.joint)
    for ref in scenario.initial:
        resolve_joint(ref)
    for ref in scenario.recordings:
        pl = placement_of(ref)
        _, local = _split_ref(ref)
        if any(j.id == local for j in pl.assembly.joints):
            continue
        find_marker(pl.assembly, local)  # raises UnknownMarkerError
    if scenario.env is not None:
        resolve_joint(scenario.env.goal_joint)
        pl = placement_of(scenario.env.handle_marker)
        _, local = _split_ref(scenario.env.handle_marker)
        find_marker(pl.assembly, local)


# --------------------------------------------------------------------------
# runtime


class ScenarioRuntime:
    """Mutable run state shared by :func:`run` and the manipulation env.

    Owns the joint states, behavior graph, property bag, and tick counter;
    :meth:`tick` advances one dt (schedules plus any extra per-joint efforts)
    and returns the behavior event records for that tick.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.placements = {pl.name: pl for pl in scenario.assemblies}
        self.joints: dict[str, JointSpec] = {}
        self.states: dict[str, dynamics.JointState] = {}
        for pl in scenario.assemblies:
            for joint in pl.assembly.joints:
                ref = f"{pl.name}/{joint.id}"
                self.joints[ref] = joint
                init = scenario.initial.get(ref)
                if init is None:
                    q0 = min(max(0.0, joint.q_lower_bound), joint.q_upper_bound)
                    self.states[ref] = dynamics.initial_state(joint, q=q0)
                else:
                    self.states[ref] = dynamics.initial_state(joint, q=init.q, q_dot=init.q_dot, s_open=init.s_open)
        self.graph = bh.bind({pl.name: pl.assembly for pl in scenario.assemblies})
        self.properties: dict[str, Union[float, bool]] = {}
        self._profiles: dict[str, list[ForceProfile]] = {}
        for schedule in scenario.forces:
            self._profiles.setdefault(schedule.joint, []).append(schedule.profile)
        self.k = 0  # completed ticks

    @property
    def t(self) -> float:
        return self.k * self.scenario.dt

    def scheduled_forces(self, t: float) -> dict[str, float]:
        return {ref: sum(p.value_at(t) for p in profiles) for ref, profiles in self._profiles.items()}

    def tick(self, extra_forces: "Mapping[str, float] | None" = None) -> list[bh.EventRecord]:
        """Advance one step: forces -> step joints -> behaviors -> apply."""
        dt = self.scenario.dt
        t_now = self.t
        forces = self.scheduled_forces(t_now)
        if extra_forces:
            for ref, value in extra_forces.items():
                forces[ref] = forces.get(ref, 0.0) + value
        new_states = {
            ref: dynamics.step(self.joints[ref], state, forces.get(ref, 0.0), dt)
            for ref, state in self.states.items()
        }
        t_next = (self.k + 1) * dt
        effects, records = bh.evaluate(self.graph, self.states, new_states, t_next)
        if effects:
            new_states, self.properties = bh.apply(effects, new_states, self.properties)
        self.states = new_states
        self.k += 1
        return records

    # -- geometry helpers ---------------------------------------------------

    def q_map(self, name: str) -> dict[str, float]:
        pl = self.placements[name]
        return {j.id: self.states[f"{name}/{j.id}"].q for j in pl.assembly.joints}

    def assembly_poses(self, name: str) -> dict[str, Pose]:
        return forward_kinematics(self.placements[name].assembly, self.q_map(name))

    def marker_position(self, ref: str) -> Vec3:
        """World position (including the placement pose) of ``assembly/marker``."""
        name, local = _split_ref(ref)
        pl = self.placements[name]
        marker = find_marker(pl.assembly, local)
        poses = self.assembly_poses(name)
        return pl.world_pose.transform_point(poses[marker.module_id].transform_point(marker.local_point))

    def marker_jacobian(self, ref: str) -> dict[str, Vec3]:
        """d(marker world position)/d(q_j) for every joint on the marker's
        root path: the joint's world axis for prismatic, axis × lever arm for
        revolute."""
        name, local = _split_ref(ref)
        pl = self.placements[name]
        marker = find_marker(pl.assembly, local)
        poses = self.assembly_poses(name)
        point = pl.world_pose.transform_point(poses[marker.module_id].transform_point(marker.local_point))

        parent_joint = {j.child_module: j for j in pl.assembly.joints}
        columns: dict[str, Vec3] = {}
        module_id = marker.module_id
        while module_id in parent_joint:
            joint = parent_joint[module_id]
            parent_pose = pl.world_pose.compose(poses[joint.parent_module])
            axis_w = parent_pose.rotate(joint.axis)
            if joint.kind == assets_mod.PRISMATIC:
                columns[f"{name}/{joint.id}"] = axis_w
            else:
                anchor_w = parent_pose.transform_point(joint.anchor)
                arm = (point[0] - anchor_w[0], point[1] - anchor_w[1], point[2] - anchor_w[2])
                columns[f"{name}/{joint.id}"] = (
                    axis_w[1] * arm[2] - axis_w[2] * arm[1],
                    axis_w[2] * arm[0] - axis_w[0] * arm[2],
                    axis_w[0] * arm[1] - axis_w[1] * arm[0],
                )
            module_id = joint.parent_module
        return columns


# --------------------------------------------------------------------------
# run


def _channel_layout(scenario: Scenario) -> list[tuple[str, str, str]]:
    """(channel name, kind, ref) triplets in recording order."""
    by_name = {pl.name: pl for pl in scenario.assemblies}
    layout: list[tuple[str, str, str]] = []
    for ref in scenario.recordings:
        name, local = _split_ref(ref)
        pl = by_name[name]
        if any(j.id == local for j in pl.assembly.joints):
            layout.append((f"{ref}.q", "joint_q", ref))
            layout.append((f"{ref}.q_dot", "joint_q_dot", ref))
        else:
            layout.append((f"{ref}.x", "marker_x", ref))
            layout.append((f"{ref}.y", "marker_y", ref))
            layout.append((f"{ref}.z", "marker_z", ref))
    return layout


def run(scenario: Scenario) -> tuple[Trajectory, bh.EventLog]:
    """Run to ``duration`` and return the recorded trajectory and event log.

    The series includes the initial sample: ``steps_for(duration, dt) + 1``
    rows, sample k at ``t = k * dt``, recorded after that tick's effects.
    """
    runtime = ScenarioRuntime(scenario)
    layout = _channel_layout(scenario)
    columns: dict[str, list[float]] = {ch: [] for ch, _, _ in layout}
    log = bh.EventLog()

    marker_cache: dict[str, Vec3] = {}

    def record() -> None:
        marker_cache.clear()
        for channel, kind, ref in layout:
            if kind == "joint_q":
                columns[channel].append(runtime.states[ref].q)
            elif kind == "joint_q_dot":
                columns[channel].append(runtime.states[ref].q_dot)
            else:
                if ref not in marker_cache:
                    marker_cache[ref] = runtime.marker_position(ref)
                point = marker_cache[ref]
                columns[channel].append(point["xyz".index(kind[-1])])

    n = dynamics.steps_for(scenario.duration, scenario.dt)
    record()
    for _ in range(n):
        log.extend(runtime.tick())
        record()

    times = np.arange(n + 1, dtype=float) * scenario.dt
    trajectory = Trajectory(times=times, channels={ch: np.array(columns[ch]) for ch, _, _ in layout})
    return trajectory, log
