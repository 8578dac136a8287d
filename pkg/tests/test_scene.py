import math

import numpy as np
import pytest

from deskprim.errors import SceneFormatError, WorkspaceError
from deskprim.scene import (
    Box,
    compose_goal,
    describe_scene,
    load_scene,
    normalize_angle,
    restore,
    scene_from_dict,
    scene_to_dict,
    snapshot,
)

from conftest import make_object, make_scene


class TestComposeGoal:
    def test_offsets_added_componentwise(self):
        target = make_object("sponge", 0.4, -0.1, z=0.02, yaw=0.3)
        goal = compose_goal(target, 0.15, math.pi / 2.0, (0.1, -0.2))
        assert np.allclose(goal.pose6[:3], [0.4, -0.1, 0.17])
        assert goal.pose6[3] == 0.1 and goal.pose6[4] == -0.2
        assert goal.yaw == pytest.approx(0.3 + math.pi / 2.0, abs=1e-12)

    def test_identity_offsets(self):
        target = make_object("cup", 0.5, 0.2, z=0.05, yaw=-1.1)
        goal = compose_goal(target, 0.0, 0.0, (0.0, 0.0))
        assert np.allclose(goal.pose6[:3], target.position)
        assert goal.yaw == -1.1

    def test_full_turn_wraps(self):
        target = make_object("cup", 0.5, 0.2, z=0.05, yaw=0.7)
        goal = compose_goal(target, 0.0, 2.0 * math.pi, (0.0, 0.0))
        assert goal.yaw == pytest.approx(0.7, abs=1e-12)

    def test_workspace_violation_names_bound(self):
        target = make_object("cup", 0.5, 0.2, z=0.05)
        ws = Box(min=[0.0, -0.4, 0.0], max=[1.0, 0.4, 0.5])
        with pytest.raises(WorkspaceError, match="z .* > max"):
            compose_goal(target, 1.0, 0.0, (0.0, 0.0), ws)

    def test_roll_pitch_from_fixed_orientation(self):
        # the target's own yaw never leaks into roll/pitch
        for yaw in (-2.0, 0.0, 3.0):
            target = make_object("cup", 0.5, 0.2, z=0.05, yaw=yaw)
            goal = compose_goal(target, 0.1, 0.2, (0.05, -0.07))
            assert (goal.pose6[3], goal.pose6[4]) == (0.05, -0.07)


class TestNormalizeAngle:
    def test_half_open_interval(self):
        rng = np.random.default_rng(2)
        for a in rng.uniform(-20, 20, 500):
            w = normalize_angle(float(a))
            assert -math.pi < w <= math.pi
            assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
            assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)

    def test_pi_maps_to_pi(self):
        assert normalize_angle(math.pi) == math.pi
        assert normalize_angle(-math.pi) == math.pi


class TestDescribeScene:
    def test_single_object_sentence(self):
        scene = make_scene([make_object("sponge", 0.40, -0.10, z=0.02, yaw=0.30)])
        assert describe_scene(scene) == (
            "there is a sponge located at (0.400, -0.100, 0.020) "
            "and oriented with yaw 0.300 rad."
        )

    def test_empty_scene(self):
        assert describe_scene(make_scene([])) == "the table is empty."

    def test_label_alphabetical_order(self, fruit_scene):
        lines = describe_scene(fruit_scene).splitlines()
        assert lines[0].startswith("there is a banana")
        assert lines[1].startswith("there is a pear")

    def test_pure_function(self, fruit_scene):
        assert describe_scene(fruit_scene) == describe_scene(fruit_scene)


class TestSnapshots:
    def test_round_trip_equality(self, fruit_scene):
        snap = snapshot(fruit_scene, {"ee": np.array([1.0, 2.0])})
        scene, ee = restore(snap)
        assert scene_to_dict(scene) == scene_to_dict(fruit_scene)
        assert np.array_equal(ee["ee"], [1.0, 2.0])

    def test_restore_undoes_mutation(self, fruit_scene):
        snap = snapshot(fruit_scene, None)
        fruit_scene.find("banana").position[0] = 0.99
        scene, _ = restore(snap)
        assert scene.find("banana").position[0] == 0.40

    def test_nested_lifo(self, fruit_scene):
        stack = []
        positions = []
        for step in range(3):
            stack.append(snapshot(fruit_scene, None))
            positions.append(fruit_scene.find("banana").position[0])
            fruit_scene.find("banana").position[0] += 0.01
        for step in reversed(range(3)):
            scene, _ = restore(stack.pop())
            assert scene.find("banana").position[0] == positions[step]


class TestSceneFiles:
    def test_round_trip(self, fruit_scene, tmp_path):
        path = tmp_path / "scene.json"
        path.write_text(__import__("json").dumps(scene_to_dict(fruit_scene)))
        again = load_scene(path)
        assert scene_to_dict(again) == scene_to_dict(fruit_scene)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(SceneFormatError, match="duplicate"):
            make_scene([make_object("cup", 0.4, 0.0), make_object("cup", 0.6, 0.0)])

    def test_outside_workspace_rejected(self):
        with pytest.raises(SceneFormatError, match="workspace"):
            make_scene([make_object("cup", 2.5, 0.0)])

    def test_interpenetration_rejected(self):
        with pytest.raises(SceneFormatError, match="interpenetrate"):
            make_scene([
                make_object("cup", 0.40, 0.0),
                make_object("mug", 0.42, 0.0),
            ])

    def test_object_inside_container_allowed(self):
        scene = make_scene([
            make_object("bowl", 0.4, 0.0, extents=(0.14, 0.14, 0.06), flags=("container",)),
            make_object("apple", 0.4, 0.0, z=0.045, extents=(0.06, 0.06, 0.07)),
        ])
        assert scene.has("apple")

    def test_bad_file_reports_error(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{nope")
        with pytest.raises(SceneFormatError):
            load_scene(p)

    def test_missing_key_reports_error(self):
        with pytest.raises(SceneFormatError):
            scene_from_dict({"objects": []})
