"""Kinematic tabletop simulator.

The end-effector tracks reference trajectories exactly (no tracking
error, no dynamics). Grasping, carrying and releasing are modeled
kinematically: a grasped object is welded to the gripper, a released
object drops straight down onto the highest support under it. Collisions
between the moving bodies (gripper body, held object) and the static
objects are recorded but do not halt the motion; they fail the subtask at
evaluation time instead, so the feedback loop can describe what went
wrong.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .dmp import GRIP, Trajectory
from .errors import DeskprimError
from .scene import Scene, SceneObject, normalize_angle


@dataclass(frozen=True)
class SimConfig:
    """Tolerances and body geometry for the kinematic model.

    The gripper body's collision box sits ``ee_body_lift`` above the tool
    center point (the fingers themselves are not modeled), so descending
    onto an object's top face does not count as a collision while pushing
    deeper does.
    """

    grasp_xy_tol: float = 0.03
    grasp_z_below: float = 0.05
    grasp_z_above: float = 0.02
    grasp_align_tol: float = math.pi / 4.0
    elongation_ratio: float = 1.5
    ee_body_extents: tuple = (0.04, 0.04, 0.10)
    ee_body_lift: float = 0.01
    gripper_threshold: float = 0.5
    carry_xy_tol: float = 0.05
    wipe_min_coverage_deg: float = 270.0
    wipe_radius_factor: float = 1.5
    container_floor: float = 0.01
    collision_max_translation: float = 5e-4
    collision_max_rotation: float = 2e-3


DEFAULT_SIM_CONFIG = SimConfig()


@dataclass
class GraspTransform:
    """Held-object pose relative to the gripper frame at grasp time."""

    dxy_local: np.ndarray
    dz: float
    dyaw: float


@dataclass
class SimState:
    """Mutable world state owned by one simulator."""

    scene: Scene
    ee_pose: np.ndarray
    gripper_closed: bool = False
    held: str | None = None
    grasp: GraspTransform | None = None
    time: float = 0.0


@dataclass
class Event:
    type: str
    time: float
    phase: float
    label: str | None = None
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"type": self.type, "time": self.time, "phase": self.phase}
        if self.label is not None:
            d["label"] = self.label
        if self.data:
            d["data"] = {k: self.data[k] for k in sorted(self.data)}
        return d


@dataclass
class ExecutionReport:
    events: list[Event]
    executed: Trajectory
    final_state: SimState
    aborted: str | None = None

    def collisions(self) -> list[Event]:
        return [e for e in self.events if e.type == "collision"]

    def first(self, etype: str, label: str | None = None) -> Event | None:
        for e in self.events:
            if e.type == etype and (label is None or e.label == label):
                return e
        return None

    def to_dict(self) -> dict:
        return {
            "events": [e.to_dict() for e in self.events],
            "aborted": self.aborted,
            "n_samples": len(self.executed),
            "dt": self.executed.dt,
            "final_ee_pose": [float(v) for v in self.final_state.ee_pose],
            "held": self.final_state.held,
            "gripper_closed": self.final_state.gripper_closed,
        }


@dataclass(frozen=True)
class Outcome:
    success: bool
    kind: str = ""
    reason: str = ""

    def to_dict(self) -> dict:
        return {"success": self.success, "kind": self.kind, "reason": self.reason}


def check_grasp(state: SimState, commanded_yaw: float, config: SimConfig = DEFAULT_SIM_CONFIG) -> str | None:
    """Decide which object, if any, a closing gripper picks up.

    A candidate must be graspable, have its xy center within
    ``grasp_xy_tol`` of the tool point, and present its top face inside
    the vertical capture band. Elongated objects additionally require the
    closing direction to line up with their minor axis (within
    ``grasp_align_tol``, modulo pi). Ties go to the nearest candidate.
    """
    ee = state.ee_pose
    best = None
    best_d = None
    for obj in state.scene.objects:
        if "graspable" not in obj.flags or obj.label == state.held:
            continue
        d = float(np.hypot(obj.position[0] - ee[0], obj.position[1] - ee[1]))
        if d > config.grasp_xy_tol:
            continue
        if not (ee[2] - config.grasp_z_below <= obj.top_z <= ee[2] + config.grasp_z_above):
            continue
        if obj.elongation >= config.elongation_ratio:
            # Closing across the minor axis is symmetric modulo pi.
            off = math.remainder(commanded_yaw - obj.yaw, math.pi)
            if abs(off) > config.grasp_align_tol:
                continue
        if best is None or d < best_d:
            best, best_d = obj.label, d
    return best


class TabletopSim:
    """Single-owner simulator: one execution mutates the state at a time."""

    def __init__(self, scene: Scene, config: SimConfig = DEFAULT_SIM_CONFIG):
        self.config = config
        self.state = SimState(scene=scene, ee_pose=scene.ee_home.copy())

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> SimState:
        return copy.deepcopy(self.state)

    def restore(self, snap: SimState) -> None:
        self.state = copy.deepcopy(snap)

    # -- helpers -----------------------------------------------------------

    def _ee_body_center(self, ee_pose: np.ndarray) -> np.ndarray:
        cfg = self.config
        return np.array([
            ee_pose[0],
            ee_pose[1],
            ee_pose[2] + cfg.ee_body_lift + cfg.ee_body_extents[2] / 2.0,
        ])

    def _held_obj(self) -> SceneObject | None:
        return self.state.scene.find(self.state.held) if self.state.held else None

    def _place_held(self, ee_pose: np.ndarray) -> None:
        obj = self._held_obj()
        g = self.state.grasp
        c, s = math.cos(ee_pose[5]), math.sin(ee_pose[5])
        obj.position = np.array([
            ee_pose[0] + c * g.dxy_local[0] - s * g.dxy_local[1],
            ee_pose[1] + s * g.dxy_local[0] + c * g.dxy_local[1],
            ee_pose[2] + g.dz,
        ])
        obj.yaw = normalize_angle(ee_pose[5] + g.dyaw)

    def _support_below(self, obj: SceneObject) -> float:
        """Highest resting level under the object's xy center."""
        cfg = self.config
        level = self.state.scene.table_height
        bottom = obj.bottom_z + 1e-9
        for other in self.state.scene.objects:
            if other.label == obj.label:
                continue
            if not other.contains_xy(obj.position):
                continue
            if "container" in other.flags:
                cand = other.bottom_z + cfg.container_floor
            else:
                cand = other.top_z
            if level < cand <= bottom:
                level = cand
        return level

    def _settle(self, obj: SceneObject) -> None:
        obj.position = obj.position.copy()
        obj.position[2] = self._support_below(obj) + obj.extents[2] / 2.0

    def _attach(self, label: str) -> None:
        obj = self.state.scene.find(label)
        ee = self.state.ee_pose
        c, s = math.cos(-ee[5]), math.sin(-ee[5])
        dx, dy = obj.position[0] - ee[0], obj.position[1] - ee[1]
        self.state.held = label
        self.state.grasp = GraspTransform(
            dxy_local=np.array([c * dx - s * dy, s * dx + c * dy]),
            dz=float(obj.position[2] - ee[2]),
            dyaw=float(obj.yaw - ee[5]),
        )

    # -- execution ---------------------------------------------------------

    def execute_trajectory(self, trajectory: Trajectory) -> ExecutionReport:
        """Track a 5-DOF reference, handling gripper edges and collisions.

        The gripper is commanded closed whenever the gripper sample is at
        or above the threshold; a closing edge attempts a grasp and an
        opening edge releases whatever is held. Collisions are recorded
        per object at first contact and do not stop the motion. Leaving
        the workspace aborts with a partial report.
        """
        st = self.state
        if len(trajectory) == 0:
            return ExecutionReport(
                events=[], executed=trajectory, final_state=self.snapshot(), aborted=None
            )
        start = trajectory.poses[0]
        if (
            np.max(np.abs(start[:3] - st.ee_pose[:3])) > 1e-6
            or abs(normalize_angle(start[3] - st.ee_pose[5])) > 1e-6
        ):
            raise DeskprimError(
                f"trajectory start {start[:4]} does not match end-effector pose "
                f"{[*st.ee_pose[:3], st.ee_pose[5]]}"
            )

        cfg = self.config
        events: list[Event] = []
        collided: set[str] = set()
        aborted = None
        t0 = st.time
        n = len(trajectory)
        prev_pose = st.ee_pose.copy()
        executed_end = n
        grasped_once = False

        for i in range(n):
            sample = trajectory.poses[i]
            # event times are relative to this execution; st.time accumulates
            tt = float(trajectory.times[i])
            phase = float(trajectory.phases[i])
            new_pose = st.ee_pose.copy()
            new_pose[0:3] = sample[0:3]
            new_pose[5] = normalize_angle(sample[3])

            bound = st.scene.workspace.violated_bound(new_pose[:3])
            if bound is not None:
                aborted = f"out-of-workspace: {bound}"
                executed_end = i
                break

            # Swept collision checks from the previous pose to this one.
            if i > 0:
                self._collide_segment(prev_pose, new_pose, tt, phase, collided, events)

            st.ee_pose = new_pose
            if st.held:
                self._place_held(new_pose)
            st.time = t0 + tt

            closed = bool(sample[GRIP] >= cfg.gripper_threshold)
            if closed and not st.gripper_closed:
                events.append(Event("grasp_attempt", tt, phase))
            if closed:
                # an empty closed gripper keeps trying as it arrives (so a
                # plain straight approach still picks the target up), but at
                # most one grasp succeeds per execution
                if st.held is None and not grasped_once:
                    label = check_grasp(st, new_pose[5], cfg)
                    if label is not None:
                        self._attach(label)
                        grasped_once = True
                        events.append(Event("grasp_success", tt, phase, label=label))
            elif st.gripper_closed:
                if st.held is not None:
                    label = st.held
                    obj = self._held_obj()
                    st.held = None
                    st.grasp = None
                    self._settle(obj)
                    events.append(Event("release", tt, phase, label=label))
            st.gripper_closed = closed
            prev_pose = new_pose

        if aborted is None and n > 0:
            events.append(
                Event("goal_reached", float(trajectory.times[-1]), float(trajectory.phases[-1]))
            )

        executed = Trajectory(
            dt=trajectory.dt,
            duration=trajectory.duration,
            times=trajectory.times[:executed_end],
            poses=trajectory.poses[:executed_end],
            velocities=trajectory.velocities[:executed_end],
            decay=trajectory.decay[:executed_end],
        )
        return ExecutionReport(
            events=events, executed=executed, final_state=self.snapshot(), aborted=aborted
        )

    def _collide_segment(self, pose_a, pose_b, tt, phase, collided, events):
        cfg = self.config
        movers = [(
            self._ee_body_center(pose_a),
            self._ee_body_center(pose_b),
            pose_a[5],
            pose_b[5],
            np.asarray(cfg.ee_body_extents, dtype=float),
            None,
        )]
        held = self._held_obj()
        if held is not None:
            g = self.state.grasp
            for_pose = []
            for pose in (pose_a, pose_b):
                c, s = math.cos(pose[5]), math.sin(pose[5])
                for_pose.append(np.array([
                    pose[0] + c * g.dxy_local[0] - s * g.dxy_local[1],
                    pose[1] + s * g.dxy_local[0] + c * g.dxy_local[1],
                    pose[2] + g.dz,
                ]))
            movers.append((
                for_pose[0],
                for_pose[1],
                pose_a[5] + g.dyaw,
                pose_b[5] + g.dyaw,
                held.extents,
                held.label,
            ))
        for obj in self.state.scene.objects:
            if obj.label in collided or obj.label == self.state.held:
                continue
            for start, end, yaw_a, yaw_b, ext, mover_label in movers:
                if mover_label is not None and "container" in obj.flags:
                    # Held cargo may pass over open-top containers.
                    continue
                reach = (
                    float(np.linalg.norm(end - start))
                    + float(np.linalg.norm(ext[:2])) / 2.0
                    + float(np.linalg.norm(obj.extents[:2])) / 2.0
                )
                if float(np.hypot(*(obj.position[:2] - start[:2]))) > reach + 1e-9:
                    continue
                hit = geometry.swept_box_hits(
                    start[None, :], end[None, :],
                    np.array([yaw_a]), np.array([yaw_b]),
                    ext, obj.position, obj.yaw, obj.extents,
                    cfg.collision_max_translation, cfg.collision_max_rotation,
                )[0]
                if hit:
                    collided.add(obj.label)
                    events.append(Event("collision", tt, phase, label=obj.label))
                    break


def _angular_coverage_deg(angles: np.ndarray) -> float:
    """360 minus the largest angular gap between the sorted samples."""
    if angles.size < 2:
        return 0.0
    a = np.sort(np.mod(angles, 2.0 * math.pi))
    gaps = np.diff(a, append=a[0] + 2.0 * math.pi)
    return math.degrees(2.0 * math.pi - float(gaps.max()))


def evaluate_subtask(before: SimState, after: SimState, subtask, report: ExecutionReport,
                     config: SimConfig = DEFAULT_SIM_CONFIG) -> Outcome:
    """Score one executed subtask against its template semantics.

    Any recorded collision fails the attempt regardless of template. The
    ``subtask`` argument carries ``kind`` plus the named objects (see the
    pipeline module).
    """
    if report.aborted:
        return Outcome(False, kind="aborted", reason=report.aborted)
    cols = report.collisions()
    if cols:
        names = ", ".join(f"{e.label} at phase {e.phase:.2f}" for e in cols)
        return Outcome(False, kind="collision", reason=f"collision with {names}")

    kind = subtask.kind
    if kind == "reach":
        ev = report.first("grasp_success", subtask.target)
        if ev is not None:
            return Outcome(True)
        wrong = report.first("grasp_success")
        if wrong is not None:
            return Outcome(False, "wrong_object", f"grasped {wrong.label} instead of {subtask.target}")
        if report.first("grasp_attempt") is not None:
            return Outcome(False, "no_grasp", f"gripper closed but missed the {subtask.target}")
        return Outcome(False, "no_grasp", "gripper never closed")
    if kind == "carry":
        if after.held != subtask.target:
            return Outcome(False, "dropped", f"not holding the {subtask.target} at the end")
        obj = after.scene.find(subtask.target)
        dest = after.scene.find(subtask.destination)
        d = float(np.hypot(*(obj.position[:2] - dest.position[:2])))
        if d <= config.carry_xy_tol:
            return Outcome(True)
        return Outcome(False, "missed_target",
                       f"{subtask.target} ended {d:.3f} m from the {subtask.destination}")
    if kind == "release":
        if after.held is not None:
            return Outcome(False, "still_held", f"still holding the {after.held}")
        if not after.scene.has(subtask.target):
            return Outcome(False, "missing", f"no object named {subtask.target}")
        obj = after.scene.find(subtask.target)
        sim = TabletopSim(after.scene, config)
        support = sim._support_below(obj)
        if abs(obj.bottom_z - support) < 1e-6:
            return Outcome(True)
        return Outcome(False, "not_resting", f"{subtask.target} is not resting on a support")
    if kind == "wiping":
        if after.held is None:
            return Outcome(False, "no_tool", "nothing held to wipe with")
        target = after.scene.find(subtask.target)
        radius = float(max(target.extents[0], target.extents[1])) / 2.0
        rel = report.executed.poses[:, :2] - target.position[None, :2]
        dist = np.hypot(rel[:, 0], rel[:, 1])
        near = dist <= config.wipe_radius_factor * radius
        cov = _angular_coverage_deg(np.arctan2(rel[near, 1], rel[near, 0]))
        if cov >= config.wipe_min_coverage_deg:
            return Outcome(True)
        return Outcome(False, "coverage",
                       f"wipe covered {cov:.0f} degrees of the {subtask.target}")
    raise DeskprimError(f"unknown subtask template {kind!r}")
