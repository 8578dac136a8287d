"""World-state model: objects, workspace, goal composition, scene text.

Objects are yaw-oriented boxes resting on a table. Poses live in the robot
base frame; ``position`` is the box center. The scene file format is plain
JSON with top-level keys ``table_height``, ``workspace``, ``ee_home`` and
``objects``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SceneFormatError, WorkspaceError

VALID_FLAGS = frozenset({"graspable", "container", "obstacle", "surface"})

SCENE_SENTENCE = (
    "there is a {label} located at ({x:.3f}, {y:.3f}, {z:.3f}) "
    "and oriented with yaw {yaw:.3f} rad."
)
EMPTY_SCENE_SENTENCE = "the table is empty."


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass
class SceneObject:
    """A labeled box with planar yaw.

    ``yaw`` is the counter-clockwise angle of the length side from +x;
    ``extents`` is (length, width, height). ``position`` is the center of
    the box.
    """

    label: str
    position: np.ndarray
    yaw: float
    extents: np.ndarray
    flags: frozenset = frozenset()

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.extents = np.asarray(self.extents, dtype=float)
        if self.position.shape != (3,):
            raise SceneFormatError(f"object {self.label!r}: position must be 3-vector")
        if self.extents.shape != (3,) or np.any(self.extents <= 0):
            raise SceneFormatError(f"object {self.label!r}: extents must be positive 3-vector")
        bad = set(self.flags) - VALID_FLAGS
        if bad:
            raise SceneFormatError(f"object {self.label!r}: unknown flags {sorted(bad)}")
        self.flags = frozenset(self.flags)

    @property
    def top_z(self) -> float:
        return float(self.position[2] + self.extents[2] / 2.0)

    @property
    def bottom_z(self) -> float:
        return float(self.position[2] - self.extents[2] / 2.0)

    @property
    def elongation(self) -> float:
        l, w = sorted(self.extents[:2])[::-1]
        return float(l / w)

    def footprint_corners(self) -> np.ndarray:
        """The four xy corners of the yawed footprint, shape (4, 2)."""
        hl, hw = self.extents[0] / 2.0, self.extents[1] / 2.0
        local = np.array([[hl, hw], [hl, -hw], [-hl, -hw], [-hl, hw]])
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + self.position[:2]

    def contains_xy(self, point: np.ndarray) -> bool:
        """True if the xy point falls inside the yawed footprint."""
        d = np.asarray(point, dtype=float)[:2] - self.position[:2]
        c, s = math.cos(-self.yaw), math.sin(-self.yaw)
        lx = c * d[0] - s * d[1]
        ly = s * d[0] + c * d[1]
        return abs(lx) <= self.extents[0] / 2.0 and abs(ly) <= self.extents[1] / 2.0


@dataclass
class Box:
    """Axis-aligned workspace box."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        self.min = np.asarray(self.min, dtype=float)
        self.max = np.asarray(self.max, dtype=float)
        if self.min.shape != (3,) or self.max.shape != (3,):
            raise SceneFormatError("workspace min/max must be 3-vectors")
        if np.any(self.min >= self.max):
            raise SceneFormatError("workspace min must be strictly below max")

    def contains(self, point: np.ndarray) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.min - 1e-12) and np.all(p <= self.max + 1e-12))

    def violated_bound(self, point: np.ndarray) -> str | None:
        """Name of the first violated bound, e.g. ``"z > max 0.5"``."""
        p = np.asarray(point, dtype=float)
        for i, axis in enumerate("xyz"):
            if p[i] < self.min[i] - 1e-12:
                return f"{axis} {p[i]:.4f} < min {self.min[i]:.4f}"
            if p[i] > self.max[i] + 1e-12:
                return f"{axis} {p[i]:.4f} > max {self.max[i]:.4f}"
        return None


@dataclass
class Scene:
    """Collection of objects plus the table, workspace and arm home pose."""

    objects: list[SceneObject]
    table_height: float
    workspace: Box
    ee_home: np.ndarray

    def __post_init__(self):
        self.ee_home = np.asarray(self.ee_home, dtype=float)
        if self.ee_home.shape != (6,):
            raise SceneFormatError("ee_home must be a 6-vector (x, y, z, roll, pitch, yaw)")
        labels = [o.label for o in self.objects]
        if len(set(labels)) != len(labels):
            raise SceneFormatError(f"duplicate object labels in scene: {sorted(labels)}")
        for obj in self.objects:
            if not self.workspace.contains(obj.position):
                raise SceneFormatError(
                    f"object {obj.label!r} outside workspace: "
                    f"{self.workspace.violated_bound(obj.position)}"
                )
        self._check_initial_overlap()

    def _check_initial_overlap(self):
        from .geometry import boxes_overlap  # local import to avoid cycle

        for i, a in enumerate(self.objects):
            for b in self.objects[i + 1:]:
                if not boxes_overlap(
                    a.position, a.yaw, a.extents, b.position, b.yaw, b.extents
                ):
                    continue
                if self._may_nest(a, b) or self._may_nest(b, a):
                    continue
                raise SceneFormatError(
                    f"objects {a.label!r} and {b.label!r} interpenetrate at load time"
                )

    @staticmethod
    def _may_nest(inner: SceneObject, outer: SceneObject) -> bool:
        # An object resting inside a container is a legal initial overlap.
        return "container" in outer.flags and outer.contains_xy(inner.position)

    def find(self, label: str) -> SceneObject:
        for obj in self.objects:
            if obj.label == label:
                return obj
        raise KeyError(f"no object labeled {label!r}")

    def has(self, label: str) -> bool:
        return any(o.label == label for o in self.objects)


@dataclass(frozen=True)
class GoalPose:
    """6-DOF end-effector goal; roll/pitch always equal the fixed start orientation."""

    pose6: np.ndarray

    @property
    def xyz(self) -> np.ndarray:
        return self.pose6[:3]

    @property
    def yaw(self) -> float:
        return float(self.pose6[5])


def compose_goal(
    target: SceneObject,
    delta_z: float,
    delta_yaw: float,
    fixed_rp: tuple[float, float],
    workspace: Box | None = None,
) -> GoalPose:
    """Goal pose above/at a target object: its center plus offsets.

    The gripper ends aligned with the object's xy center, at the object's
    center height plus ``delta_z``, yawed to the object's yaw plus
    ``delta_yaw`` (normalized to (-pi, pi]). Roll and pitch stay at the
    fixed start orientation.
    """
    x, y, z = target.position
    z = z + delta_z
    yaw = normalize_angle(target.yaw + delta_yaw)
    if workspace is not None:
        goal_pt = np.array([x, y, z])
        bound = workspace.violated_bound(goal_pt)
        if bound is not None:
            raise WorkspaceError(
                f"goal for {target.label!r} outside workspace: {bound}"
            )
    pose6 = np.array([x, y, z, fixed_rp[0], fixed_rp[1], yaw], dtype=float)
    return GoalPose(pose6=pose6)


def describe_scene(scene: Scene) -> str:
    """One templated sentence per object, label-alphabetical, newline-joined."""
    if not scene.objects:
        return EMPTY_SCENE_SENTENCE
    lines = []
    for obj in sorted(scene.objects, key=lambda o: o.label):
        lines.append(
            SCENE_SENTENCE.format(
                label=obj.label,
                x=obj.position[0],
                y=obj.position[1],
                z=obj.position[2],
                yaw=obj.yaw,
            )
        )
    return "\n".join(lines)


@dataclass(frozen=True)
class Snapshot:
    """Deep-copied scene plus arbitrary end-effector state."""

    scene: Scene
    ee_state: object


def snapshot(scene: Scene, ee_state) -> Snapshot:
    return Snapshot(scene=copy.deepcopy(scene), ee_state=copy.deepcopy(ee_state))


def restore(snap: Snapshot) -> tuple[Scene, object]:
    return copy.deepcopy(snap.scene), copy.deepcopy(snap.ee_state)


def scene_to_dict(scene: Scene) -> dict:
    return {
        "table_height": scene.table_height,
        "workspace": {"min": scene.workspace.min.tolist(), "max": scene.workspace.max.tolist()},
        "ee_home": scene.ee_home.tolist(),
        "objects": [
            {
                "label": o.label,
                "position": o.position.tolist(),
                "yaw": o.yaw,
                "extents": o.extents.tolist(),
                "flags": sorted(o.flags),
            }
            for o in scene.objects
        ],
    }


def scene_from_dict(data: dict) -> Scene:
    try:
        objects = [
            SceneObject(
                label=od["label"],
                position=od["position"],
                yaw=float(od.get("yaw", 0.0)),
                extents=od["extents"],
                flags=frozenset(od.get("flags", [])),
            )
            for od in data["objects"]
        ]
        return Scene(
            objects=objects,
            table_height=float(data["table_height"]),
            workspace=Box(min=data["workspace"]["min"], max=data["workspace"]["max"]),
            ee_home=np.asarray(data["ee_home"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneFormatError(f"bad scene data: {exc}") from exc


def load_scene(path: str | Path) -> Scene:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SceneFormatError(f"cannot read scene file {path}: {exc}") from exc
    return scene_from_dict(data)
