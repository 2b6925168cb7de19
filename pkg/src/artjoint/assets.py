"""Articulated-object assets: rigid modules connected by driven joints.

An assembly is a tree of :class:`RigidModule` nodes whose edges are
:class:`JointSpec` joints (prismatic or revolute). Assets round-trip through
a strict JSON format (``.artjoint.json``): unknown keys are rejected, every
number is written with shortest round-trip precision, and
``parse_asset(serialize_asset(a))`` reproduces ``a`` exactly.

Frame conventions: a joint's ``axis`` and ``anchor`` are expressed in the
parent module's frame; ``rest_pose`` is the child's pose relative to the
parent module (relative to ``base_frame`` for the root module).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from . import behaviors as bh
from .errors import (
    AssetSyntaxError,
    AssetValidationError,
    CyclicStructureError,
    InvalidLimitsError,
    MissingModuleError,
    NonUnitAxisError,
)
from .geometry import IDENTITY_POSE, Pose, Quat, Vec3, quat_norm, vec_norm

UNIT_TOLERANCE = 1e-9

PRISMATIC = "prismatic"
REVOLUTE = "revolute"
JOINT_KINDS = (PRISMATIC, REVOLUTE)


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Marker:
    """A named point on a module, in that module's local frame (meters)."""

    module_id: str
    name: str
    local_point: Vec3


@dataclass(frozen=True)
class RigidModule:
    id: str
    mass: float  # kg, > 0
    rest_pose: Pose = IDENTITY_POSE
    markers: tuple[Marker, ...] = ()
    affordance_label: str = ""


@dataclass(frozen=True)
class ConstantStiffness:
    k: float


@dataclass(frozen=True)
class StiffnessSchedule:
    """Position-dependent drive stiffness.

    Within ``(q_lower_bound, q_threshold]`` the profile is a linear fall-off
    from ``k_high`` when the joint is flagged open, and ``k_low`` plus an
    exponential surge ``k_max * exp(-lambda_ * (q - q_lower_bound))`` when it
    is not (the door-closer ramp). ``k_high`` holds at the lower bound and
    ``k_low`` beyond the threshold. See ``dynamics.stiffness_at``.
    """

    k_high: float
    k_low: float
    k_max: float
    alpha: float
    lambda_: float
    q_threshold: float


StiffnessProfile = Union[ConstantStiffness, StiffnessSchedule]


@dataclass(frozen=True)
class FixedTarget:
    q_target: float


@dataclass(frozen=True)
class LatchTarget:
    """Open/closed-dependent drive target with hysteresis.

    Targets the upper bound when the joint is past ``q_threshold`` and open,
    the lower bound when below and not open, and otherwise holds the
    previously evaluated target. See ``dynamics.target_at``.
    """

    q_threshold: float


TargetPolicy = Union[FixedTarget, LatchTarget]


@dataclass(frozen=True)
class JointSpec:
    """One driven degree of freedom connecting two modules.

    ``axis``/``anchor`` live in the parent module's frame; ``axis`` must be
    unit length. Position units are meters (prismatic) or radians (revolute);
    efforts are N or N·m accordingly. ``damping_D`` doubles as the kinetic
    friction coefficient, and the breakaway threshold while at rest is
    ``mu_s * |tau_drive| + coulomb_floor``.
    """

    id: str
    kind: str  # "prismatic" | "revolute"
    parent_module: str
    child_module: str
    axis: Vec3
    anchor: Vec3 = (0.0, 0.0, 0.0)
    q_lower_bound: float = 0.0
    q_upper_bound: float = 1.0
    damping_D: float = 0.0
    mu_s: float = 0.0
    coulomb_floor: float = 0.0
    effective_inertia: float = 1.0
    stiffness: StiffnessProfile = ConstantStiffness(0.0)
    target_policy: TargetPolicy = FixedTarget(0.0)
    target_velocity: float = 0.0

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.q_lower_bound, self.q_upper_bound)


@dataclass(frozen=True)
class Assembly:
    id: str
    root_module: str
    modules: tuple[RigidModule, ...]
    joints: tuple[JointSpec, ...] = ()
    behaviors: tuple[bh.BehaviorRule, ...] = ()
    category: str = ""
    base_frame: Pose = IDENTITY_POSE

    def module(self, module_id: str) -> RigidModule:
        for m in self.modules:
            if m.id == module_id:
                return m
        raise KeyError(f"no module '{module_id}' in assembly '{self.id}'")

    def joint(self, joint_id: str) -> JointSpec:
        for j in self.joints:
            if j.id == joint_id:
                return j
        raise KeyError(f"no joint '{joint_id}' in assembly '{self.id}'")

    def markers(self) -> tuple[Marker, ...]:
        return tuple(marker for m in self.modules for marker in m.markers)


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __iter__(self):
        return iter(self.issues)

    def __len__(self) -> int:
        return len(self.issues)

    def add(self, code: str, path: str, message: str) -> None:
        self.issues.append(ValidationIssue(code, path, message))


def _check_pose(report: ValidationReport, pose: Pose, path: str) -> None:
    if abs(quat_norm(pose.orientation) - 1.0) > UNIT_TOLERANCE:
        report.add("non-unit-quaternion", path, f"orientation is not unit length: {pose.orientation}")


def validate(assembly: Assembly) -> ValidationReport:
    """Check every structural invariant; returns a report, never raises.

    Covered: unique ids, tree-ness rooted at root_module, positive masses and
    inertias, unit axes (1e-9), ordered limits, non-negative
    friction/stiffness parameters, thresholds and fixed targets within
    limits, unit quaternions, marker-name uniqueness per module, and behavior
    rules with resolvable local references and non-empty effect lists.
    """
    report = ValidationReport()
    module_ids = [m.id for m in assembly.modules]
    module_set = set(module_ids)

    if not assembly.modules:
        report.add("missing-module", "modules", "assembly has no modules")
    for i, mid in enumerate(module_ids):
        if module_ids.index(mid) != i:
            report.add("duplicate-id", f"modules[{i}]", f"duplicate module id '{mid}'")
    if assembly.root_module not in module_set:
        report.add("missing-module", "root_module", f"root module '{assembly.root_module}' not defined")

    _check_pose(report, assembly.base_frame, "base_frame")
    for i, module in enumerate(assembly.modules):
        path = f"modules[{i}]"
        if not (module.mass > 0.0):
            report.add("non-positive-mass", path, f"module '{module.id}' mass must be > 0, got {module.mass}")
        _check_pose(report, module.rest_pose, f"{path}.rest_pose")
        seen = set()
        for marker in module.markers:
            if marker.module_id != module.id:
                report.add("missing-module", path, f"marker '{marker.name}' carries module_id '{marker.module_id}'")
            if marker.name in seen:
                report.add("duplicate-marker", path, f"duplicate marker name '{marker.name}' on module '{module.id}'")
            seen.add(marker.name)

    joint_ids = [j.id for j in assembly.joints]
    for i, jid in enumerate(joint_ids):
        if joint_ids.index(jid) != i:
            report.add("duplicate-id", f"joints[{i}]", f"duplicate joint id '{jid}'")

    parent_of: dict[str, str] = {}
    for i, joint in enumerate(assembly.joints):
        path = f"joints[{i}]"
        for end, mid in (("parent_module", joint.parent_module), ("child_module", joint.child_module)):
            if mid not in module_set:
                report.add("missing-module", f"{path}.{end}", f"joint '{joint.id}' references unknown module '{mid}'")
        if joint.child_module in parent_of:
            report.add("cyclic-structure", path, f"module '{joint.child_module}' has more than one parent joint")
        parent_of[joint.child_module] = joint.parent_module
        if joint.child_module == assembly.root_module:
            report.add("cyclic-structure", path, f"root module '{assembly.root_module}' cannot be a joint child")

        if abs(vec_norm(joint.axis) - 1.0) > UNIT_TOLERANCE:
            report.add("non-unit-axis", f"{path}.axis", f"joint '{joint.id}' axis is not unit length: {joint.axis}")
        lo, hi = joint.q_lower_bound, joint.q_upper_bound
        if not (lo < hi):
            report.add("invalid-limits", path, f"joint '{joint.id}' requires q_lower_bound < q_upper_bound, got [{lo}, {hi}]")
        if not (joint.effective_inertia > 0.0):
            report.add("non-positive-inertia", path, f"joint '{joint.id}' effective_inertia must be > 0")
        for name in ("damping_D", "mu_s", "coulomb_floor"):
            if getattr(joint, name) < 0.0:
                report.add("negative-parameter", f"{path}.{name}", f"joint '{joint.id}' {name} must be >= 0")

        st = joint.stiffness
        if isinstance(st, ConstantStiffness):
            if st.k < 0.0:
                report.add("invalid-stiffness", f"{path}.stiffness", f"joint '{joint.id}' constant stiffness must be >= 0")
        else:
            for name in ("k_high", "k_low", "k_max", "alpha", "lambda_"):
                if getattr(st, name) < 0.0:
                    report.add("invalid-stiffness", f"{path}.stiffness", f"joint '{joint.id}' schedule {name} must be >= 0")
            if st.k_low > st.k_high:
                report.add("invalid-stiffness", f"{path}.stiffness", f"joint '{joint.id}' schedule requires k_low <= k_high")
            if lo < hi and not (lo <= st.q_threshold <= hi):
                report.add("threshold-out-of-range", f"{path}.stiffness", f"joint '{joint.id}' stiffness q_threshold {st.q_threshold} outside [{lo}, {hi}]")

        tp = joint.target_policy
        if isinstance(tp, FixedTarget):
            if lo < hi and not (lo <= tp.q_target <= hi):
                report.add("target-out-of-limits", f"{path}.target_policy", f"joint '{joint.id}' fixed target {tp.q_target} outside [{lo}, {hi}]")
        else:
            if lo < hi and not (lo <= tp.q_threshold <= hi):
                report.add("threshold-out-of-range", f"{path}.target_policy", f"joint '{joint.id}' latch q_threshold {tp.q_threshold} outside [{lo}, {hi}]")

    # Tree check: every non-root module reachable from the root through joints.
    if assembly.root_module in module_set:
        children: dict[str, list[str]] = {}
        for joint in assembly.joints:
            children.setdefault(joint.parent_module, []).append(joint.child_module)
        reached = set()
        stack = [assembly.root_module]
        while stack:
            mid = stack.pop()
            if mid in reached:
                continue  # a cycle re-visiting; flagged below by parent counts
            reached.add(mid)
            stack.extend(children.get(mid, ()))
        unreachable = [mid for mid in module_ids if mid not in reached]
        for mid in unreachable:
            report.add("cyclic-structure", "modules", f"module '{mid}' is not reachable from root '{assembly.root_module}'")

    joint_set = {j.id for j in assembly.joints}
    limits = {j.id: (j.q_lower_bound, j.q_upper_bound) for j in assembly.joints}
    rule_ids = set()
    for i, rule in enumerate(assembly.behaviors):
        path = f"behaviors[{i}]"
        if rule.id in rule_ids:
            report.add("duplicate-id", path, f"duplicate rule id '{rule.id}'")
        rule_ids.add(rule.id)
        if not rule.effects:
            report.add("empty-effects", path, f"rule '{rule.id}' has no effects")
        trig = rule.trigger
        if isinstance(trig, bh.ThresholdCrossed) and trig.joint not in joint_set:
            report.add("unresolved-reference", f"{path}.trigger", f"rule '{rule.id}' trigger references unknown joint '{trig.joint}'")
        for k, effect in enumerate(rule.effects):
            epath = f"{path}.effects[{k}]"
            if isinstance(effect, (bh.SetOpenState, bh.SetFixedTarget)):
                if effect.joint not in joint_set:
                    report.add("unresolved-reference", epath, f"rule '{rule.id}' references unknown joint '{effect.joint}'")
                elif isinstance(effect, bh.SetFixedTarget):
                    lo, hi = limits[effect.joint]
                    if not (lo <= effect.q_target <= hi):
                        report.add("target-out-of-limits", epath, f"rule '{rule.id}' sets target {effect.q_target} outside [{lo}, {hi}] of joint '{effect.joint}'")
            elif isinstance(effect, bh.SetProperty):
                if effect.target not in module_set:
                    report.add("unresolved-reference", epath, f"rule '{rule.id}' references unknown module '{effect.target}'")
    return report


_RAISE_BY_CODE = {
    "missing-module": MissingModuleError,
    "invalid-limits": InvalidLimitsError,
    "cyclic-structure": CyclicStructureError,
    "non-unit-axis": NonUnitAxisError,
}


def raise_on_issues(report: ValidationReport) -> None:
    """Raise the typed error for the first issue of a failed report."""
    if report.ok:
        return
    first = report.issues[0]
    cls = _RAISE_BY_CODE.get(first.code, AssetValidationError)
    extra = f" (+{len(report.issues) - 1} more issue(s))" if len(report.issues) > 1 else ""
    raise cls(f"{first.path}: {first.message}{extra}")


# --------------------------------------------------------------------------
# strict JSON reading helpers


def _require_dict(value: Any, loc: str) -> dict:
    if not isinstance(value, dict):
        raise AssetSyntaxError(f"expected an object, got {type(value).__name__}", loc)
    return value


def _require_list(value: Any, loc: str) -> list:
    if not isinstance(value, list):
        raise AssetSyntaxError(f"expected an array, got {type(value).__name__}", loc)
    return value


def _check_keys(data: dict, required: tuple, optional: tuple, loc: str) -> None:
    for key in required:
        if key not in data:
            raise AssetSyntaxError(f"missing required key '{key}'", loc)
    allowed = set(required) | set(optional)
    unknown = [k for k in data if k not in allowed]
    if unknown:
        raise AssetSyntaxError(f"unknown key(s) {unknown}", loc)


def _as_str(value: Any, loc: str) -> str:
    if not isinstance(value, str):
        raise AssetSyntaxError(f"expected a string, got {type(value).__name__}", loc)
    return value


def _as_bool(value: Any, loc: str) -> bool:
    if not isinstance(value, bool):
        raise AssetSyntaxError(f"expected a boolean, got {type(value).__name__}", loc)
    return value


def _as_float(value: Any, loc: str) -> float:
    # bool is an int subclass; reject it as a number explicitly.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise AssetSyntaxError(f"expected a number, got {type(value).__name__}", loc)
    out = float(value)
    if not math.isfinite(out):
        raise AssetSyntaxError(f"number must be finite, got {out}", loc)
    return out


def _as_vec(value: Any, n: int, loc: str) -> tuple:
    items = _require_list(value, loc)
    if len(items) != n:
        raise AssetSyntaxError(f"expected {n} numbers, got {len(items)}", loc)
    return tuple(_as_float(v, f"{loc}[{i}]") for i, v in enumerate(items))


def _parse_pose(value: Any, loc: str) -> Pose:
    data = _require_dict(value, loc)
    _check_keys(data, (), ("position", "orientation"), loc)
    position: Vec3 = _as_vec(data["position"], 3, f"{loc}.position") if "position" in data else (0.0, 0.0, 0.0)
    orientation: Quat = (
        _as_vec(data["orientation"], 4, f"{loc}.orientation") if "orientation" in data else (1.0, 0.0, 0.0, 0.0)
    )
    return Pose(position=position, orientation=orientation)


def _parse_stiffness(value: Any, loc: str) -> StiffnessProfile:
    data = _require_dict(value, loc)
    kind = _as_str(data.get("type", ""), f"{loc}.type")
    if kind == "constant":
        _check_keys(data, ("type", "k"), (), loc)
        return ConstantStiffness(k=_as_float(data["k"], f"{loc}.k"))
    if kind == "schedule":
        _check_keys(data, ("type", "k_high", "k_low", "k_max", "alpha", "lambda", "q_threshold"), (), loc)
        return StiffnessSchedule(
            k_high=_as_float(data["k_high"], f"{loc}.k_high"),
            k_low=_as_float(data["k_low"], f"{loc}.k_low"),
            k_max=_as_float(data["k_max"], f"{loc}.k_max"),
            alpha=_as_float(data["alpha"], f"{loc}.alpha"),
            lambda_=_as_float(data["lambda"], f"{loc}.lambda"),
            q_threshold=_as_float(data["q_threshold"], f"{loc}.q_threshold"),
        )
    raise AssetSyntaxError(f"unknown stiffness type '{kind}'", loc)


def _parse_target_policy(value: Any, loc: str) -> TargetPolicy:
    data = _require_dict(value, loc)
    kind = _as_str(data.get("type", ""), f"{loc}.type")
    if kind == "fixed":
        _check_keys(data, ("type", "q_target"), (), loc)
        return FixedTarget(q_target=_as_float(data["q_target"], f"{loc}.q_target"))
    if kind == "latch":
        _check_keys(data, ("type", "q_threshold"), (), loc)
        return LatchTarget(q_threshold=_as_float(data["q_threshold"], f"{loc}.q_threshold"))
    raise AssetSyntaxError(f"unknown target policy type '{kind}'", loc)


def _parse_trigger(value: Any, loc: str) -> bh.Trigger:
    data = _require_dict(value, loc)
    kind = _as_str(data.get("type", ""), f"{loc}.type")
    if kind == "threshold_crossed":
        _check_keys(data, ("type", "joint", "value", "direction"), (), loc)
        direction = _as_str(data["direction"], f"{loc}.direction")
        if direction not in ("rising", "falling"):
            raise AssetSyntaxError(f"direction must be 'rising' or 'falling', got '{direction}'", f"{loc}.direction")
        return bh.ThresholdCrossed(
            joint=_as_str(data["joint"], f"{loc}.joint"),
            value=_as_float(data["value"], f"{loc}.value"),
            direction=direction,
        )
    if kind == "signal_received":
        _check_keys(data, ("type", "name"), (), loc)
        return bh.SignalReceived(name=_as_str(data["name"], f"{loc}.name"))
    raise AssetSyntaxError(f"unknown trigger type '{kind}'", loc)


def _parse_effect(value: Any, loc: str) -> bh.Effect:
    data = _require_dict(value, loc)
    kind = _as_str(data.get("type", ""), f"{loc}.type")
    if kind == "set_open_state":
        _check_keys(data, ("type", "joint", "value"), (), loc)
        return bh.SetOpenState(joint=_as_str(data["joint"], f"{loc}.joint"), value=_as_bool(data["value"], f"{loc}.value"))
    if kind == "set_fixed_target":
        _check_keys(data, ("type", "joint", "q_target"), (), loc)
        return bh.SetFixedTarget(joint=_as_str(data["joint"], f"{loc}.joint"), q_target=_as_float(data["q_target"], f"{loc}.q_target"))
    if kind == "emit_signal":
        _check_keys(data, ("type", "name"), (), loc)
        return bh.EmitSignal(name=_as_str(data["name"], f"{loc}.name"))
    if kind == "set_property":
        _check_keys(data, ("type", "target", "key", "value"), (), loc)
        raw = data["value"]
        value_out: Union[float, bool]
        if isinstance(raw, bool):
            value_out = raw
        else:
            value_out = _as_float(raw, f"{loc}.value")
        return bh.SetProperty(target=_as_str(data["target"], f"{loc}.target"), key=_as_str(data["key"], f"{loc}.key"), value=value_out)
    raise AssetSyntaxError(f"unknown effect type '{kind}'", loc)


def _parse_rule(value: Any, loc: str) -> bh.BehaviorRule:
    data = _require_dict(value, loc)
    _check_keys(data, ("id", "trigger", "effects"), (), loc)
    effects = _require_list(data["effects"], f"{loc}.effects")
    return bh.BehaviorRule(
        id=_as_str(data["id"], f"{loc}.id"),
        trigger=_parse_trigger(data["trigger"], f"{loc}.trigger"),
        effects=tuple(_parse_effect(e, f"{loc}.effects[{i}]") for i, e in enumerate(effects)),
    )


def _parse_joint(value: Any, loc: str) -> JointSpec:
    data = _require_dict(value, loc)
    _check_keys(
        data,
        ("id", "kind", "parent_module", "child_module", "axis"),
        (
            "anchor",
            "q_lower_bound",
            "q_upper_bound",
            "damping_D",
            "mu_s",
            "coulomb_floor",
            "effective_inertia",
            "stiffness",
            "target_policy",
            "target_velocity",
        ),
        loc,
    )
    kind = _as_str(data["kind"], f"{loc}.kind")
    if kind not in JOINT_KINDS:
        raise AssetSyntaxError(f"kind must be one of {JOINT_KINDS}, got '{kind}'", f"{loc}.kind")

    def opt_float(key: str, default: float) -> float:
        return _as_float(data[key], f"{loc}.{key}") if key in data else default

    return JointSpec(
        id=_as_str(data["id"], f"{loc}.id"),
        kind=kind,
        parent_module=_as_str(data["parent_module"], f"{loc}.parent_module"),
        child_module=_as_str(data["child_module"], f"{loc}.child_module"),
        axis=_as_vec(data["axis"], 3, f"{loc}.axis"),
        anchor=_as_vec(data["anchor"], 3, f"{loc}.anchor") if "anchor" in data else (0.0, 0.0, 0.0),
        q_lower_bound=opt_float("q_lower_bound", 0.0),
        q_upper_bound=opt_float("q_upper_bound", 1.0),
        damping_D=opt_float("damping_D", 0.0),
        mu_s=opt_float("mu_s", 0.0),
        coulomb_floor=opt_float("coulomb_floor", 0.0),
        effective_inertia=opt_float("effective_inertia", 1.0),
        stiffness=_parse_stiffness(data["stiffness"], f"{loc}.stiffness") if "stiffness" in data else ConstantStiffness(0.0),
        target_policy=_parse_target_policy(data["target_policy"], f"{loc}.target_policy") if "target_policy" in data else FixedTarget(0.0),
        target_velocity=opt_float("target_velocity", 0.0),
    )


def _parse_module(value: Any, loc: str) -> RigidModule:
    data = _require_dict(value, loc)
    _check_keys(data, ("id", "mass"), ("rest_pose", "affordance_label"), loc)
    return RigidModule(
        id=_as_str(data["id"], f"{loc}.id"),
        mass=_as_float(data["mass"], f"{loc}.mass"),
        rest_pose=_parse_pose(data["rest_pose"], f"{loc}.rest_pose") if "rest_pose" in data else IDENTITY_POSE,
        affordance_label=_as_str(data["affordance_label"], f"{loc}.affordance_label") if "affordance_label" in data else "",
    )


def _reject_constant(text: str):
    raise AssetSyntaxError(f"non-finite JSON constant '{text}' is not allowed", "")


def assembly_from_dict(data: Any, source: str = "<data>") -> Assembly:
    """Build an Assembly from decoded JSON, strictly (unknown keys rejected).

    Raises :class:`AssetSyntaxError` for shape problems and
    :class:`MissingModuleError` for markers naming modules that don't exist.
    No other semantic validation happens here — see :func:`validate`.
    """
    root = _require_dict(data, source)
    _check_keys(root, ("id", "root_module", "modules"), ("category", "base_frame", "joints", "behaviors", "markers"), source)

    modules = [_parse_module(m, f"modules[{i}]") for i, m in enumerate(_require_list(root["modules"], "modules"))]
    joints = tuple(
        _parse_joint(j, f"joints[{i}]") for i, j in enumerate(_require_list(root.get("joints", []), "joints"))
    )
    behaviors = tuple(
        _parse_rule(r, f"behaviors[{i}]") for i, r in enumerate(_require_list(root.get("behaviors", []), "behaviors"))
    )

    markers_by_module: dict[str, list[Marker]] = {m.id: [] for m in modules}
    for i, entry in enumerate(_require_list(root.get("markers", []), "markers")):
        loc = f"markers[{i}]"
        mdata = _require_dict(entry, loc)
        _check_keys(mdata, ("module_id", "name", "local_point"), (), loc)
        marker = Marker(
            module_id=_as_str(mdata["module_id"], f"{loc}.module_id"),
            name=_as_str(mdata["name"], f"{loc}.name"),
            local_point=_as_vec(mdata["local_point"], 3, f"{loc}.local_point"),
        )
        if marker.module_id not in markers_by_module:
            raise MissingModuleError(f"{loc}: marker '{marker.name}' references unknown module '{marker.module_id}'")
        markers_by_module[marker.module_id].append(marker)

    modules_out = tuple(
        RigidModule(
            id=m.id,
            mass=m.mass,
            rest_pose=m.rest_pose,
            markers=tuple(markers_by_module[m.id]),
            affordance_label=m.affordance_label,
        )
        for m in modules
    )
    return Assembly(
        id=_as_str(root["id"], "id"),
        root_module=_as_str(root["root_module"], "root_module"),
        modules=modules_out,
        joints=joints,
        behaviors=behaviors,
        category=_as_str(root.get("category", ""), "category"),
        base_frame=_parse_pose(root["base_frame"], "base_frame") if "base_frame" in root else IDENTITY_POSE,
    )


def parse_asset_text(text: str, source: str = "<text>") -> Assembly:
    """Parse asset JSON text into a fully validated Assembly.

    Raises :class:`AssetSyntaxError` (malformed JSON/shape) or the typed
    validation error for the first failed invariant (MissingModuleError,
    InvalidLimitsError, CyclicStructureError, NonUnitAxisError, or
    AssetValidationError).
    """
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise AssetSyntaxError(str(exc), source) from exc
    assembly = assembly_from_dict(data, source)
    raise_on_issues(validate(assembly))
    return assembly


def parse_asset(path: "str | Path") -> Assembly:
    """Load and validate a ``.artjoint.json`` file. See :func:`parse_asset_text`."""
    p = Path(path)
    return parse_asset_text(p.read_text(encoding="utf-8"), source=str(p))


# --------------------------------------------------------------------------
# serialization


def _pose_to_dict(pose: Pose) -> dict:
    return {"position": list(pose.position), "orientation": list(pose.orientation)}


def _stiffness_to_dict(st: StiffnessProfile) -> dict:
    if isinstance(st, ConstantStiffness):
        return {"type": "constant", "k": st.k}
    return {
        "type": "schedule",
        "k_high": st.k_high,
        "k_low": st.k_low,
        "k_max": st.k_max,
        "alpha": st.alpha,
        "lambda": st.lambda_,
        "q_threshold": st.q_threshold,
    }


def _target_policy_to_dict(tp: TargetPolicy) -> dict:
    if isinstance(tp, FixedTarget):
        return {"type": "fixed", "q_target": tp.q_target}
    return {"type": "latch", "q_threshold": tp.q_threshold}


def _trigger_to_dict(trigger: bh.Trigger) -> dict:
    if isinstance(trigger, bh.ThresholdCrossed):
        return {"type": "threshold_crossed", "joint": trigger.joint, "value": trigger.value, "direction": trigger.direction}
    return {"type": "signal_received", "name": trigger.name}


def _effect_to_dict(effect: bh.Effect) -> dict:
    if isinstance(effect, bh.SetOpenState):
        return {"type": "set_open_state", "joint": effect.joint, "value": effect.value}
    if isinstance(effect, bh.SetFixedTarget):
        return {"type": "set_fixed_target", "joint": effect.joint, "q_target": effect.q_target}
    if isinstance(effect, bh.EmitSignal):
        return {"type": "emit_signal", "name": effect.name}
    return {"type": "set_property", "target": effect.target, "key": effect.key, "value": effect.value}


def assembly_to_dict(assembly: Assembly) -> dict:
    return {
        "id": assembly.id,
        "category": assembly.category,
        "base_frame": _pose_to_dict(assembly.base_frame),
        "root_module": assembly.root_module,
        "modules": [
            {
                "id": m.id,
                "mass": m.mass,
                "rest_pose": _pose_to_dict(m.rest_pose),
                "affordance_label": m.affordance_label,
            }
            for m in assembly.modules
        ],
        "joints": [
            {
                "id": j.id,
                "kind": j.kind,
                "parent_module": j.parent_module,
                "child_module": j.child_module,
                "axis": list(j.axis),
                "anchor": list(j.anchor),
                "q_lower_bound": j.q_lower_bound,
                "q_upper_bound": j.q_upper_bound,
                "damping_D": j.damping_D,
                "mu_s": j.mu_s,
                "coulomb_floor": j.coulomb_floor,
                "effective_inertia": j.effective_inertia,
                "stiffness": _stiffness_to_dict(j.stiffness),
                "target_policy": _target_policy_to_dict(j.target_policy),
                "target_velocity": j.target_velocity,
            }
            for j in assembly.joints
        ],
        "behaviors": [
            {
                "id": r.id,
                "trigger": _trigger_to_dict(r.trigger),
                "effects": [_effect_to_dict(e) for e in r.effects],
            }
            for r in assembly.behaviors
        ],
        "markers": [
            {"module_id": marker.module_id, "name": marker.name, "local_point": list(marker.local_point)}
            for marker in assembly.markers()
        ],
    }


def serialize_asset(assembly: Assembly) -> str:
    """Encode an assembly as canonical asset JSON.

    Numbers are emitted with shortest round-trip precision (Python float
    repr), so ``parse_asset_text(serialize_asset(a)) == a`` exactly.
    """
    return json.dumps(assembly_to_dict(assembly), indent=2, allow_nan=False) + "\n"
