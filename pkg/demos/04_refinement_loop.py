"""The judge-driven refinement loop.

The first carry attempt ships straight-line weights and collides with a
juice box; the scripted rule judge turns the failure into a natural-
language correction; the retry replays shaped weights and clears it. The
world resets between attempts, so the retry starts exactly where the
first attempt did.

Run from the repository root:  python3 demos/04_refinement_loop.py
"""

import json
from pathlib import Path

from deskprim.llm import BackendConfig, make_backend
from deskprim.pipeline import RuleJudge, TaskSession
from deskprim.scene import load_scene
from deskprim.sim import TabletopSim

root = Path(__file__).resolve().parent.parent / "scenarios"
spec = json.loads((root / "index.json").read_text())["refine_drop_into_cup"]

scene = load_scene(root / spec["scene"])
sim = TabletopSim(scene)
backend = make_backend(BackendConfig.scripted(root / spec["fixture"]))
session = TaskSession(spec["task"], sim, backend, RuleJudge())

report = session.run_task()

print(f"task: {report.task} -> success={report.success}\n")
carry = next(s for s in report.subtasks if s.subtask.kind == "carry")
print(f"carry subtask: {carry.subtask.raw}")
print(f"feedback rounds: {carry.feedback_rounds}\n")

a1, a2 = carry.attempts
print(f"attempt 1: {a1.outcome['reason']}")
print(f"judge said: {a1.feedback!r}\n")

followup = a2.prompts[3]["content"]
print("the retry prompt carries the past weights, the correction history")
print("and a heuristic action plan:")
print("-" * 60)
print("\n".join(followup.splitlines()[:14]))
print("  ...")
print("-" * 60)
print(f"\nattempt 2: success={a2.outcome['success']}")
