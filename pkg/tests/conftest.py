"""Shared test helpers: bundled assemblies, a random-asset generator, and
the acceptance-criteria reporting hook."""

from __future__ import annotations

import math

import numpy as np
import pytest

import artjoint as aj
from artjoint import fixtures as fx
from artjoint.geometry import quat_from_axis_angle


def load_assembly(name: str) -> aj.Assembly:
    return aj.parse_asset(fx.asset_path(name))


@pytest.fixture(scope="session")
def drawer() -> aj.Assembly:
    return load_assembly("drawer")


@pytest.fixture(scope="session")
def microwave() -> aj.Assembly:
    return load_assembly("microwave")


@pytest.fixture(scope="session")
def oven() -> aj.Assembly:
    return load_assembly("oven")


@pytest.fixture(scope="session")
def trashcan() -> aj.Assembly:
    return load_assembly("trashcan")


def make_joint(**overrides) -> aj.JointSpec:
    """A plain prismatic joint — frictionless, undriven, wide limits — so a
    test can override exactly the parameters it exercises."""
    params = dict(
        id="j",
        kind=aj.PRISMATIC,
        parent_module="base",
        child_module="rod",
        axis=(1.0, 0.0, 0.0),
        anchor=(0.0, 0.0, 0.0),
        q_lower_bound=-10.0,
        q_upper_bound=10.0,
        damping_D=0.0,
        mu_s=0.0,
        coulomb_floor=0.0,
        effective_inertia=1.0,
        stiffness=aj.ConstantStiffness(k=0.0),
        target_policy=aj.FixedTarget(q_target=0.0),
        target_velocity=0.0,
    )
    params.update(overrides)
    return aj.JointSpec(**params)


# ---------------------------------------------------------------------------
# random (but always valid) assemblies, JSON-shaped


def unit_axis(rng: np.random.Generator) -> list[float]:
    v = rng.normal(size=3)
    while float(np.linalg.norm(v)) < 0.3:
        v = rng.normal(size=3)
    v = v / np.linalg.norm(v)
    return [float(c) for c in v]


def _pose_dict(rng: np.random.Generator) -> dict:
    if rng.integers(0, 2) == 0:
        return {"position": [0.0, 0.0, 0.0], "orientation": [1.0, 0.0, 0.0, 0.0]}
    quat = quat_from_axis_angle(tuple(unit_axis(rng)), float(rng.uniform(-math.pi, math.pi)))
    return {
        "position": [float(x) for x in rng.uniform(-1.0, 1.0, size=3)],
        "orientation": [float(c) for c in quat],
    }


def random_assembly_dict(rng: np.random.Generator, index: int = 0) -> dict:
    """A randomized module tree with valid joints, markers, and sometimes a
    behavior rule — always passes validation."""
    n_modules = int(rng.integers(2, 7))
    module_ids = [f"m{k}" for k in range(n_modules)]
    modules = []
    markers = []
    for k, mid in enumerate(module_ids):
        modules.append(
            {
                "id": mid,
                "mass": float(rng.uniform(0.1, 20.0)),
                "rest_pose": _pose_dict(rng),
                "affordance_label": str(rng.choice(["", "pull", "press", "rotate"])),
            }
        )
        if rng.integers(0, 2):
            markers.append(
                {
                    "module_id": mid,
                    "name": f"mark{k}",
                    "local_point": [float(x) for x in rng.uniform(-0.5, 0.5, size=3)],
                }
            )
    joints = []
    for k in range(1, n_modules):
        lo = float(rng.uniform(-1.0, 0.5))
        hi = lo + float(rng.uniform(0.05, 2.0))
        if rng.integers(0, 2):
            stiffness = {"type": "constant", "k": float(rng.uniform(0.0, 50.0))}
        else:
            k_low = float(rng.uniform(0.0, 5.0))
            stiffness = {
                "type": "schedule",
                "k_high": k_low + float(rng.uniform(0.0, 40.0)),
                "k_low": k_low,
                "k_max": float(rng.uniform(0.0, 80.0)),
                "alpha": float(rng.uniform(0.0, 30.0)),
                "lambda": float(rng.uniform(0.0, 20.0)),
                "q_threshold": float(rng.uniform(lo, hi)),
            }
        if rng.integers(0, 2):
            policy = {"type": "fixed", "q_target": float(rng.uniform(lo, hi))}
        else:
            policy = {"type": "latch", "q_threshold": float(rng.uniform(lo, hi))}
        joints.append(
            {
                "id": f"j{k}",
                "kind": str(rng.choice(["prismatic", "revolute"])),
                "parent_module": module_ids[int(rng.integers(0, k))],
                "child_module": module_ids[k],
                "axis": unit_axis(rng),
                "anchor": [float(x) for x in rng.uniform(-0.5, 0.5, size=3)],
                "q_lower_bound": lo,
                "q_upper_bound": hi,
                "damping_D": float(rng.uniform(0.0, 5.0)),
                "mu_s": float(rng.uniform(0.0, 0.5)),
                "coulomb_floor": float(rng.uniform(0.0, 1.0)),
                "effective_inertia": float(rng.uniform(0.01, 3.0)),
                "stiffness": stiffness,
                "target_policy": policy,
                "target_velocity": float(rng.uniform(-0.5, 0.5)),
            }
        )
    behaviors = []
    if joints and rng.integers(0, 2):
        j = joints[int(rng.integers(0, len(joints)))]
        behaviors.append(
            {
                "id": "rule0",
                "trigger": {
                    "type": "threshold_crossed",
                    "joint": j["id"],
                    "value": 0.5 * (j["q_lower_bound"] + j["q_upper_bound"]),
                    "direction": str(rng.choice(["rising", "falling"])),
                },
                "effects": [
                    {"type": "set_open_state", "joint": j["id"], "value": bool(rng.integers(0, 2))},
                    {"type": "emit_signal", "name": "ping"},
                ],
            }
        )
    return {
        "id": f"asset{index}",
        "category": "generated",
        "base_frame": _pose_dict(rng),
        "root_module": module_ids[0],
        "modules": modules,
        "joints": joints,
        "markers": markers,
        "behaviors": behaviors,
    }


def random_assembly(rng: np.random.Generator, index: int = 0) -> aj.Assembly:
    return aj.assembly_from_dict(random_assembly_dict(rng, index))


# ---------------------------------------------------------------------------
# acceptance-criteria reporting: one PASS/FAIL line per criterion, echoed in
# the terminal summary so they are visible on a plain `pytest -v` run

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def criterion_report():
    def _report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:02d} {'PASS' if ok else 'FAIL'} — {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
