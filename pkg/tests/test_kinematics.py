"""Forward kinematics and marker positions on the bundled assemblies."""

import math

import numpy as np
import pytest

import artjoint as aj
from artjoint.geometry import quat_from_axis_angle
from artjoint.kinematics import clamp_to_limits, find_marker

from conftest import make_joint


def zero_config(assembly):
    return {j.id: 0.0 for j in assembly.joints}


def test_rest_configuration_reproduces_rest_poses(drawer, microwave, trashcan):
    for assembly in (drawer, microwave, trashcan):
        poses = forward = aj.forward_kinematics(assembly, zero_config(assembly))
        assert set(forward) == {m.id for m in assembly.modules}
        for module in assembly.modules:
            world = assembly.base_frame.compose(module.rest_pose)
            assert poses[module.id].position == pytest.approx(world.position, abs=1e-15)


def test_prismatic_slides_along_axis(drawer):
    poses = aj.forward_kinematics(drawer, {"slide": 0.3})
    assert poses["tray"].position == pytest.approx((0.3, 0.0, 0.0), abs=1e-15)
    assert poses["cabinet"].position == (0.0, 0.0, 0.0)


def test_drawer_handle_marker_tracks_q(drawer):
    for q in (0.0, 0.1, 0.45):
        point = aj.marker_world(drawer, {"slide": q}, "handle")
        assert point == pytest.approx((0.22 + q, 0.0, 0.10), abs=1e-15)


def test_trashcan_rim_swings_about_hinge(trashcan):
    # lid rotates about +x through (0, -0.15, 0.60); the rim sits 0.30 up the
    # lid plane and 0.02 proud of it
    for theta in (0.0, 0.4, 1.8):
        got = aj.marker_world(trashcan, {"lid": theta, "button": 0.0}, "lid_rim")
        want = (
            0.0,
            -0.15 + 0.30 * math.cos(theta) - 0.02 * math.sin(theta),
            0.60 + 0.30 * math.sin(theta) + 0.02 * math.cos(theta),
        )
        assert got == pytest.approx(want, abs=1e-12)


def test_trashcan_rim_at_open_stop(trashcan):
    got = aj.marker_world(trashcan, {"lid": 1.8, "button": 0.0}, "lid_rim")
    assert got == pytest.approx((0.0, -0.23763758, 0.88761025), abs=1e-7)


def test_revolute_chain_composition():
    """Two stacked revolute joints about the same axis add their angles."""
    rng = np.random.default_rng(31)
    base = {
        "id": "chain",
        "category": "",
        "base_frame": {"position": [0.0, 0.0, 0.0], "orientation": [1.0, 0.0, 0.0, 0.0]},
        "root_module": "a",
        "modules": [
            {"id": m, "mass": 1.0, "rest_pose": {"position": [0.0, 0.0, 0.0], "orientation": [1.0, 0.0, 0.0, 0.0]}, "affordance_label": ""}
            for m in ("a", "b", "c")
        ],
        "joints": [
            {
                "id": f"j{i}",
                "kind": "revolute",
                "parent_module": p,
                "child_module": c,
                "axis": [0.0, 0.0, 1.0],
                "anchor": [0.0, 0.0, 0.0],
                "q_lower_bound": -3.2,
                "q_upper_bound": 3.2,
            }
            for i, (p, c) in enumerate((("a", "b"), ("b", "c")))
        ],
        "markers": [{"module_id": "c", "name": "tip", "local_point": [1.0, 0.0, 0.0]}],
        "behaviors": [],
    }
    assembly = aj.assembly_from_dict(base)
    for _ in range(20):
        q0, q1 = (float(x) for x in rng.uniform(-1.5, 1.5, size=2))
        tip = aj.marker_world(assembly, {"j0": q0, "j1": q1}, "tip")
        want = (math.cos(q0 + q1), math.sin(q0 + q1), 0.0)
        assert tip == pytest.approx(want, abs=1e-9)


def test_base_frame_carries_the_whole_assembly(drawer):
    import dataclasses

    moved = dataclasses.replace(
        drawer,
        base_frame=aj.Pose(position=(1.0, 2.0, 3.0), orientation=quat_from_axis_angle((0.0, 0.0, 1.0), math.pi / 2)),
    )
    point = aj.marker_world(moved, {"slide": 0.1}, "handle")
    # handle local (0.32, 0, 0.10) rotates onto +y then shifts
    assert point == pytest.approx((1.0 - 0.0, 2.0 + 0.32, 3.0 + 0.10), abs=1e-12)


def test_configuration_must_match_joints(drawer):
    with pytest.raises(aj.UnknownJointError):
        aj.forward_kinematics(drawer, {})
    with pytest.raises(aj.UnknownJointError):
        aj.forward_kinematics(drawer, {"slide": 0.0, "bogus": 1.0})


def test_out_of_limit_values_clamp_with_warning(drawer):
    with pytest.warns(UserWarning, match="slide"):
        poses = aj.forward_kinematics(drawer, {"slide": 99.0})
    assert poses["tray"].position[0] == pytest.approx(0.45)


def test_unknown_marker(drawer):
    with pytest.raises(aj.UnknownMarkerError):
        aj.marker_world(drawer, {"slide": 0.0}, "nope")
    with pytest.raises(aj.UnknownMarkerError):
        find_marker(drawer, "nope")


def test_joint_transform_prismatic_and_revolute():
    slide = make_joint(axis=(0.0, 1.0, 0.0))
    pose = aj.joint_transform(slide, 0.25)
    assert pose.position == (0.0, 0.25, 0.0)
    assert pose.orientation == (1.0, 0.0, 0.0, 0.0)

    hinge = make_joint(kind=aj.REVOLUTE, axis=(0.0, 0.0, 1.0), anchor=(1.0, 0.0, 0.0))
    pose = aj.joint_transform(hinge, math.pi)
    # the anchor itself is a fixed point of the rotation
    assert pose.transform_point((1.0, 0.0, 0.0)) == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)
    assert pose.transform_point((2.0, 0.0, 0.0)) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)


def test_clamp_to_limits():
    joint = make_joint(q_lower_bound=0.0, q_upper_bound=0.45)
    assert clamp_to_limits(joint, -1.0) == 0.0
    assert clamp_to_limits(joint, 0.2) == 0.2
    assert clamp_to_limits(joint, 1.0) == 0.45
