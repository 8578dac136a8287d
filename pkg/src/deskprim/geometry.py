"""Overlap tests for yaw-oriented boxes.

All boxes here are upright: rotated about z only. Two such boxes overlap
iff their z-intervals overlap and their xy footprints (rotated rectangles)
overlap, which the separating-axis test decides exactly using the four
face normals of the two rectangles.
"""

from __future__ import annotations

import math

import numpy as np


def _rect_axes(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, s], [-s, c]])


def rects_overlap(c1, yaw1, ext1, c2, yaw2, ext2) -> bool:
    """Exact overlap test for two rotated rectangles in the plane.

    ``ext`` is the full (length, width); touching counts as overlap up to
    a 1e-12 slack.
    """
    c1 = np.asarray(c1, dtype=float)[:2]
    c2 = np.asarray(c2, dtype=float)[:2]
    half1 = np.asarray(ext1, dtype=float)[:2] / 2.0
    half2 = np.asarray(ext2, dtype=float)[:2] / 2.0
    a1 = _rect_axes(yaw1)
    a2 = _rect_axes(yaw2)
    d = c2 - c1
    for axis in (*a1, *a2):
        r1 = half1[0] * abs(axis @ a1[0]) + half1[1] * abs(axis @ a1[1])
        r2 = half2[0] * abs(axis @ a2[0]) + half2[1] * abs(axis @ a2[1])
        if abs(axis @ d) > r1 + r2 + 1e-12:
            return False
    return True


def boxes_overlap(p1, yaw1, ext1, p2, yaw2, ext2) -> bool:
    """Overlap test for two upright oriented boxes (full extents)."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    hz1 = float(ext1[2]) / 2.0
    hz2 = float(ext2[2]) / 2.0
    if abs(p1[2] - p2[2]) > hz1 + hz2 + 1e-12:
        return False
    return rects_overlap(p1, yaw1, ext1, p2, yaw2, ext2)


def swept_box_hits(
    starts: np.ndarray,
    ends: np.ndarray,
    yaw_starts: np.ndarray,
    yaw_ends: np.ndarray,
    ext,
    obstacle_pos,
    obstacle_yaw: float,
    obstacle_ext,
    max_translation: float = 5e-4,
    max_rotation: float = 2e-3,
) -> np.ndarray:
    """Per-segment swept overlap of a moving box against one static box.

    Each segment ``starts[i] -> ends[i]`` is subdivided so that no substep
    moves the box more than ``max_translation`` meters or ``max_rotation``
    radians, and the static overlap test runs at every substep pose
    (both endpoints included). Returns a boolean array, one entry per
    segment.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    yaw_starts = np.asarray(yaw_starts, dtype=float)
    yaw_ends = np.asarray(yaw_ends, dtype=float)
    n = starts.shape[0]
    hits = np.zeros(n, dtype=bool)
    for i in range(n):
        dist = float(np.linalg.norm(ends[i] - starts[i]))
        dyaw = abs(yaw_ends[i] - yaw_starts[i])
        # at least 10 substeps, in multiples of 10 so coarser validation
        # grids are always a subset of the poses checked here
        subs = 10 * max(
            1,
            int(math.ceil(dist / max_translation / 10.0)),
            int(math.ceil(dyaw / max_rotation / 10.0)),
        )
        for k in range(subs + 1):
            t = k / subs
            pos = starts[i] + t * (ends[i] - starts[i])
            yaw = yaw_starts[i] + t * (yaw_ends[i] - yaw_starts[i])
            if boxes_overlap(pos, yaw, ext, obstacle_pos, obstacle_yaw, obstacle_ext):
                hits[i] = True
                break
    return hits
