"""Edge-triggered behavior rules: triggers, effects, binding, and same-tick
evaluation.

Rules live inside an assembly (they serialize with it) and reference that
assembly's joints/modules by bare id. ``bind`` qualifies every reference with
the assembly's scenario name (``"microwave/door_hinge"``), which is what lets
one assembly's rule listen to a signal another assembly emits.

Trigger/effect evaluation is deliberately simple and deterministic:

* ``ThresholdCrossed`` fires on the sign of the crossing between the previous
  and the new sample of a joint's position — rising when
  ``prev < value <= new``, falling when ``prev > value >= new``. Holding a
  joint past the threshold therefore fires exactly once until it re-crosses
  in the opposite direction.
* ``SignalReceived`` fires within the same tick as the emit, resolved in
  waves; a chain deeper than 16 waves raises :class:`SignalLoopError`.
* Effects are collected during evaluation and applied after the physics step
  of the tick in which they fired; every effect is an idempotent assignment.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import SignalLoopError, UnresolvedReferenceError

SIGNAL_CHAIN_DEPTH_CAP = 16

# --------------------------------------------------------------------------
# rule datatypes (these serialize inside asset files under behaviors[])


@dataclass(frozen=True)
class ThresholdCrossed:
    """Fires when a joint's position crosses ``value`` in ``direction``."""

    joint: str
    value: float
    direction: str  # "rising" | "falling"


@dataclass(frozen=True)
class SignalReceived:
    """Fires when a named signal was emitted earlier in the same tick."""

    name: str


Trigger = Union[ThresholdCrossed, SignalReceived]


@dataclass(frozen=True)
class SetOpenState:
    """Set a joint's open flag (the latch-policy discriminator)."""

    joint: str
    value: bool


@dataclass(frozen=True)
class SetFixedTarget:
    """Replace a joint's held drive target (the latch hysteresis memory)."""

    joint: str
    q_target: float


@dataclass(frozen=True)
class EmitSignal:
    name: str


@dataclass(frozen=True)
class SetProperty:
    """Write a scalar/flag into a module's property bag (no physics effect)."""

    target: str  # module id (bare in a rule, "assembly/module" once bound)
    key: str
    value: Union[float, bool]


Effect = Union[SetOpenState, SetFixedTarget, EmitSignal, SetProperty]


@dataclass(frozen=True)
class BehaviorRule:
    id: str
    trigger: Trigger
    effects: tuple[Effect, ...]


# --------------------------------------------------------------------------
# event log


@dataclass(frozen=True)
class EventRecord:
    """One fired trigger or one applied effect, timestamped with the end of
    the tick in which it happened."""

    t: float
    kind: str  # "trigger" | "effect"
    rule_id: str  # qualified "assembly/rule"
    detail: str
    effect_type: str = ""  # e.g. "set_open_state"; empty for triggers


@dataclass
class EventLog:
    records: list[EventRecord] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def count_effects(self, effect_type: str) -> int:
        return sum(1 for r in self.records if r.kind == "effect" and r.effect_type == effect_type)

    def extend(self, records: Iterable[EventRecord]) -> None:
        self.records.extend(records)


# --------------------------------------------------------------------------
# binding


@dataclass(frozen=True)
class BoundRule:
    """A rule with every reference qualified as ``assembly/...``."""

    rule_id: str
    trigger: Trigger
    effects: tuple[Effect, ...]


@dataclass(frozen=True)
class BehaviorGraph:
    """Compiled rule set plus its (source, target) edge list — one edge per
    (rule, effect), signals appearing as ``signal:<name>`` nodes."""

    rules: tuple[BoundRule, ...]
    edges: tuple[tuple[str, str], ...]


def _qualify_trigger(trigger: Trigger, name: str, joints: set, rule_id: str) -> Trigger:
    if isinstance(trigger, ThresholdCrossed):
        if trigger.joint not in joints:
            raise UnresolvedReferenceError(
                f"rule '{rule_id}': trigger references unknown joint '{trigger.joint}'"
            )
        return dataclasses.replace(trigger, joint=f"{name}/{trigger.joint}")
    return trigger


def _qualify_effect(effect: Effect, name: str, joints: set, modules: set, rule_id: str) -> Effect:
    if isinstance(effect, (SetOpenState, SetFixedTarget)):
        if effect.joint not in joints:
            raise UnresolvedReferenceError(
                f"rule '{rule_id}': effect references unknown joint '{effect.joint}'"
            )
        return dataclasses.replace(effect, joint=f"{name}/{effect.joint}")
    if isinstance(effect, SetProperty):
        if effect.target not in modules:
            raise UnresolvedReferenceError(
                f"rule '{rule_id}': effect references unknown module '{effect.target}'"
            )
        return dataclasses.replace(effect, target=f"{name}/{effect.target}")
    return effect


def _node_of_trigger(trigger: Trigger) -> str:
    if isinstance(trigger, ThresholdCrossed):
        return trigger.joint
    return f"signal:{trigger.name}"


def _node_of_effect(effect: Effect) -> str:
    if isinstance(effect, (SetOpenState, SetFixedTarget)):
        return effect.joint
    if isinstance(effect, EmitSignal):
        return f"signal:{effect.name}"
    return effect.target


def bind(assemblies: Mapping[str, "object"]) -> BehaviorGraph:
    """Compile the rules of all placed assemblies into one graph.

    ``assemblies`` maps scenario-level name -> Assembly. Raises
    :class:`UnresolvedReferenceError` when a rule references a joint/module
    its own assembly does not define, or when an effect list is empty.
    """
    rules: list[BoundRule] = []
    edges: list[tuple[str, str]] = []
    for name, assembly in assemblies.items():
        joints = {j.id for j in assembly.joints}
        modules = {m.id for m in assembly.modules}
        for rule in assembly.behaviors:
            rule_id = f"{name}/{rule.id}"
            if not rule.effects:
                raise UnresolvedReferenceError(f"rule '{rule_id}' has no effects")
            trigger = _qualify_trigger(rule.trigger, name, joints, rule_id)
            effects = tuple(
                _qualify_effect(e, name, joints, modules, rule_id) for e in rule.effects
            )
            rules.append(BoundRule(rule_id=rule_id, trigger=trigger, effects=effects))
            src = _node_of_trigger(trigger)
            edges.extend((src, _node_of_effect(e)) for e in effects)
    return BehaviorGraph(rules=tuple(rules), edges=tuple(edges))


# --------------------------------------------------------------------------
# evaluation and application


def _crossed(trigger: ThresholdCrossed, prev_q: float, new_q: float) -> bool:
    if trigger.direction == "rising":
        return prev_q < trigger.value <= new_q
    return prev_q > trigger.value >= new_q


def _describe(effect: Effect) -> tuple[str, str]:
    if isinstance(effect, SetOpenState):
        return "set_open_state", f"set_open_state {effect.joint} <- {effect.value}"
    if isinstance(effect, SetFixedTarget):
        return "set_fixed_target", f"set_fixed_target {effect.joint} <- {effect.q_target}"
    if isinstance(effect, EmitSignal):
        return "emit_signal", f"emit_signal {effect.name}"
    return "set_property", f"set_property {effect.target}.{effect.key} <- {effect.value}"


def evaluate(
    graph: BehaviorGraph,
    prev_states: Mapping[str, "object"],
    new_states: Mapping[str, "object"],
    t: float,
) -> tuple[list[Effect], list[EventRecord]]:
    """Fire rules for the step ``prev_states -> new_states`` ending at ``t``.

    Returns the effects to apply (EmitSignal is consumed here, not returned)
    and the log records, ordered rule-by-rule in firing order. Pure: no state
    is touched.
    """
    effects: list[Effect] = []
    records: list[EventRecord] = []
    wave: list[str] = []

    def fire(rule: BoundRule, why: str) -> None:
        records.append(EventRecord(t=t, kind="trigger", rule_id=rule.rule_id, detail=why))
        for effect in rule.effects:
            effect_type, detail = _describe(effect)
            records.append(
                EventRecord(t=t, kind="effect", rule_id=rule.rule_id, detail=detail, effect_type=effect_type)
            )
            if isinstance(effect, EmitSignal):
                if effect.name not in wave:
                    wave.append(effect.name)
            else:
                effects.append(effect)

    for rule in graph.rules:
        trig = rule.trigger
        if isinstance(trig, ThresholdCrossed):
            prev = prev_states[trig.joint].q
            new = new_states[trig.joint].q
            if _crossed(trig, prev, new):
                fire(rule, f"threshold_crossed {trig.joint} {trig.direction} {trig.value}")

    depth = 0
    while wave:
        depth += 1
        if depth > SIGNAL_CHAIN_DEPTH_CAP:
            raise SignalLoopError(
                f"signal chain exceeded depth cap {SIGNAL_CHAIN_DEPTH_CAP} at t={t}: {wave}"
            )
        current, wave = wave, []
        for rule in graph.rules:
            trig = rule.trigger
            if isinstance(trig, SignalReceived) and trig.name in current:
                fire(rule, f"signal_received {trig.name}")
    return effects, records


def apply(
    effects: Iterable[Effect],
    states: Mapping[str, "object"],
    properties: Mapping[str, Union[float, bool]] | None = None,
) -> tuple[dict, dict]:
    """Apply effects to joint states / the property bag, returning new dicts.

    ``states`` maps qualified joint ref -> JointState; ``properties`` maps
    ``"assembly/module.key"`` -> scalar. Pure and idempotent: every effect is
    an assignment.
    """
    new_states = dict(states)
    new_properties = dict(properties or {})
    for effect in effects:
        if isinstance(effect, SetOpenState):
            new_states[effect.joint] = dataclasses.replace(new_states[effect.joint], s_open=effect.value)
        elif isinstance(effect, SetFixedTarget):
            new_states[effect.joint] = dataclasses.replace(
                new_states[effect.joint], held_target=effect.q_target
            )
        elif isinstance(effect, SetProperty):
            new_properties[f"{effect.target}.{effect.key}"] = effect.value
        # EmitSignal is consumed during evaluation; applying it is a no-op.
    return new_states, new_properties
