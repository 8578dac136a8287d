"""Report visualization: top-down paths and per-DOF time series."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dmp import DOF_NAMES, Trajectory


def _load_attempt_trajectory(report_dir: Path, attempt: dict) -> Trajectory | None:
    name = attempt.get("trajectory_csv")
    if not name:
        return None
    duration = attempt.get("trajectory_meta", {}).get("duration", 1.0)
    return Trajectory.from_csv((report_dir / name).read_text(), duration)


def export_plot(report_path: str | Path, out_dir: str | Path,
                inspect_hook=None) -> list[Path]:
    """Render one figure per subtask attempt; returns the written paths.

    Each figure pairs a top-down (x, y) view of the executed path over the
    object footprints with the five DOF time series. ``inspect_hook``
    receives ``(fig, ax_top, ax_ts)`` before each figure is saved.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    report_path = Path(report_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = json.loads(report_path.read_text())
    scene = report["scene"]
    ws_min, ws_max = scene["workspace"]["min"], scene["workspace"]["max"]

    written = []
    for si, sub in enumerate(report["subtasks"]):
        for ai, attempt in enumerate(sub["attempts"]):
            traj = _load_attempt_trajectory(report_path.parent, attempt)
            if traj is None:
                continue
            fig, (ax_top, ax_ts) = plt.subplots(1, 2, figsize=(11, 4.5))
            ax_top.set_xlim(ws_min[0], ws_max[0])
            ax_top.set_ylim(ws_min[1], ws_max[1])
            ax_top.set_aspect("equal")
            ax_top.set_title(f"subtask {si}: {sub['subtask']['raw']} (attempt {ai + 1})")
            for obj in scene["objects"]:
                ox, oy = obj["position"][:2]
                l, w = obj["extents"][:2]
                yaw = obj.get("yaw", 0.0)
                c, s = np.cos(yaw), np.sin(yaw)
                local = np.array([[l, w], [l, -w], [-l, -w], [-l, w]]) / 2.0
                corners = local @ np.array([[c, -s], [s, c]]).T + [ox, oy]
                ax_top.fill(corners[:, 0], corners[:, 1], alpha=0.35)
                ax_top.annotate(obj["label"], (ox, oy), ha="center", fontsize=8)
            ax_top.plot(traj.poses[:, 0], traj.poses[:, 1], lw=1.5)
            ax_top.plot(traj.poses[0, 0], traj.poses[0, 1], "o", ms=5)
            ax_top.plot(traj.poses[-1, 0], traj.poses[-1, 1], "x", ms=7)
            for ev in attempt["events"]:
                if ev["type"] == "collision":
                    idx = min(int(round(ev["time"] / traj.dt)), len(traj) - 1)
                    ax_top.plot(traj.poses[idx, 0], traj.poses[idx, 1], "r*", ms=10)
                    ax_ts.axvline(ev["time"], color="red", lw=0.8, alpha=0.6)
            for d in range(5):
                ax_ts.plot(traj.times, traj.poses[:, d], label=DOF_NAMES[d], lw=1.0)
            ax_ts.set_xlabel("t [s]")
            ax_ts.legend(fontsize=8, ncol=5, loc="upper center")
            ax_ts.set_title("reference per DOF")
            fig.tight_layout()
            if inspect_hook is not None:
                inspect_hook(fig, ax_top, ax_ts)
            path = out_dir / f"subtask{si:02d}_attempt{ai + 1}.png"
            fig.savefig(path, dpi=110)
            plt.close(fig)
            written.append(path)
    return written
