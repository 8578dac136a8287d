"""Driving a session over HTTP.

Starts the service on a local port, creates a scripted session, tails the
rollout stream and submits feedback through the same endpoints the
browser UI uses.

Run from the repository root:  python3 demos/05_service_session.py
"""

import json
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from deskprim.config import AppConfig
from deskprim.service import create_app

root = Path(__file__).resolve().parent.parent / "scenarios"
spec = json.loads((root / "index.json").read_text())["refine_drop_into_cup"]

app = create_app(AppConfig(), scenes_dir=root / "scenes")
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=8431,
                                       log_level="error"))
threading.Thread(target=server.run, daemon=True).start()

base = "http://127.0.0.1:8431"
client = httpx.Client(base_url=base, timeout=30.0)
while True:
    try:
        if client.get("/healthz").status_code == 200:
            break
    except httpx.TransportError:
        time.sleep(0.05)

sid = client.post("/sessions", json={
    "scene": str(root / spec["scene"]),
    "task": spec["task"],
    "fixtures": str(root / spec["fixture"]),
    "judge": "interactive",
}).json()["id"]
print(f"session {sid} started: {spec['task']!r}")


def wait_state(*states):
    while True:
        s = client.get(f"/sessions/{sid}").json()
        if s["state"] in states:
            return s
        time.sleep(0.05)


# accept the reach, correct the first carry, accept the rest
correction = "you hit the juice box, lift up early and curve right"
for step in range(4):
    status = wait_state("awaiting_feedback", "done")
    if status["state"] == "done":
        break
    outcome = status["outcome"] or {}
    print(f"awaiting feedback on {status['current_subtask']!r}: "
          f"success={outcome.get('success')}")
    text = correction if outcome.get("success") is False else ""
    print(f"  -> sending {text!r}" if text else "  -> accepting")
    client.post(f"/sessions/{sid}/feedback", json={"text": text})

status = wait_state("done", "failed")
print(f"\nfinal state: {status['state']}, success: {status['success']}")
print(f"plan: {status['plan']}")

records = []
with client.stream("GET", f"/sessions/{sid}/rollout") as resp:
    for line in resp.iter_lines():
        if line:
            records.append(json.loads(line))
samples = [r for r in records if r["type"] == "sample"]
events = [r for r in records if r["type"] == "event"]
print(f"stream: {len(samples)} samples, {len(events)} events")
print(f"last sample pose: {['%.3f' % v for v in samples[-1]['pose5']]}")

server.should_exit = True
