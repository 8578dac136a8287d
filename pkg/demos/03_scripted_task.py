"""One full task through the pipeline, replayed from fixtures.

Runs "move the banana near the pear" with an obstacle on the carry path.
The scripted backend replays the decomposer and generator exchanges that
were frozen for this scenario; everything else (perception text, goal
composition, rollout, simulation, evaluation) is computed live.

Run from the repository root:  python3 demos/03_scripted_task.py
"""

import json
from pathlib import Path

from deskprim.llm import BackendConfig, make_backend
from deskprim.pipeline import AcceptJudge, TaskSession
from deskprim.scene import load_scene
from deskprim.sim import TabletopSim

root = Path(__file__).resolve().parent.parent / "scenarios"
spec = json.loads((root / "index.json").read_text())["carry_obstacle"]

scene = load_scene(root / spec["scene"])
sim = TabletopSim(scene)
backend = make_backend(BackendConfig.scripted(root / spec["fixture"]))
session = TaskSession(spec["task"], sim, backend, AcceptJudge())

report = session.run_task()

print(f"task: {report.task}")
print(f"status: {report.status}, success: {report.success}\n")
for i, rec in enumerate(report.subtasks):
    print(f"subtask {i}: {rec.subtask.raw}")
    if rec.subtask.avoidance_note:
        print(f"  avoidance note: {rec.subtask.avoidance_note}")
    for j, attempt in enumerate(rec.attempts):
        outcome = attempt.outcome
        print(f"  attempt {j + 1}: success={outcome['success']}"
              + (f" ({outcome['reason']})" if outcome["reason"] else ""))
        for ev in attempt.events:
            if ev["type"] in ("grasp_success", "release", "collision"):
                print(f"    {ev['type']}"
                      + (f" [{ev.get('label')}]" if ev.get("label") else "")
                      + f" at phase {ev['phase']:.2f}")

# the carry leg's weight matrix, as the generator emitted it
carry = report.subtasks[1].attempts[0]
print("\ncarry weights (x, y, z, yaw, gripper rows):")
for row in carry.weights:
    print("  [" + ", ".join(f"{v:5.2f}" for v in row) + "]")
print(f"goal offsets: height={carry.height}, angle={carry.angle}")
