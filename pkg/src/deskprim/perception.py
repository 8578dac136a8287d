"""Ground-truth perception adapter.

Stands in for a camera/segmentation stack: reads object labels and poses
straight out of the simulator state, optionally perturbed by seeded
uniform noise. The currently held object is excluded, mirroring occlusion
by the gripper.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import SimState


@dataclass(frozen=True)
class NoiseConfig:
    enabled: bool = False
    position_bound_m: float = 0.0
    seed: int = 0


@dataclass
class DetectedObject:
    label: str
    position: np.ndarray
    yaw: float
    extents: np.ndarray


def perceive(state: SimState, noise: NoiseConfig = NoiseConfig()) -> list[DetectedObject]:
    """Detected-object list for every scene object not currently held.

    With noise disabled the poses are exact copies of ground truth. With
    noise enabled, positions get zero-mean uniform offsets within
    ``position_bound_m``, drawn from a generator seeded per call so the
    same seed always reproduces the same perturbations (objects are
    perturbed in label order).
    """
    rng = np.random.default_rng(noise.seed) if noise.enabled else None
    out = []
    for obj in sorted(state.scene.objects, key=lambda o: o.label):
        if obj.label == state.held:
            continue
        pos = obj.position.copy()
        if rng is not None and noise.position_bound_m > 0:
            pos = pos + rng.uniform(-noise.position_bound_m, noise.position_bound_m, 3)
        out.append(DetectedObject(label=obj.label, position=pos, yaw=obj.yaw,
                                  extents=obj.extents.copy()))
    return out


def object_list_text(detections: list[DetectedObject]) -> str:
    """Deterministic label-ordered text block, one line per object."""
    if not detections:
        return "none"
    lines = []
    for d in sorted(detections, key=lambda o: o.label):
        lines.append(
            f"- {d.label}: position ({d.position[0]:.3f}, {d.position[1]:.3f}, "
            f"{d.position[2]:.3f}), angle {d.yaw:.3f} rad, extents "
            f"({d.extents[0]:.3f}, {d.extents[1]:.3f}, {d.extents[2]:.3f})"
        )
    return "\n".join(lines)
