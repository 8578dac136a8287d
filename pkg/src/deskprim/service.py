"""HTTP service: session control, rollout streaming, feedback intake.

Each session owns one simulator and runs its task on a worker thread.
Clients watch progress through a newline-delimited JSON stream of
decimated trajectory samples and events, and drive the refinement loop by
posting feedback while the session sits in ``awaiting_feedback``.
"""

from __future__ import annotations

import copy
import json
import queue
import threading
import uuid
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import StreamingResponse

from .config import AppConfig
from .llm import BackendConfig, make_backend
from .pipeline import AcceptJudge, Judge, PipelineObserver, RuleJudge, TaskSession
from .errors import SceneFormatError
from .scene import load_scene, scene_from_dict, scene_to_dict
from .sim import TabletopSim


class FeedbackJudge(Judge):
    """Blocks the worker until a client posts feedback (empty = accept)."""

    def __init__(self, session: "Session"):
        self.session = session

    def judge(self, report, subtask, outcome=None):
        text = self.session.feedback_queue.get()
        return text.strip() or None


class SessionObserver(PipelineObserver):
    def __init__(self, session: "Session"):
        self.session = session

    def on_state(self, state, **info):
        s = self.session
        with s.cond:
            s.state = state
            if "outcome" in info:
                s.last_outcome = info["outcome"]
            if "subtask" in info:
                s.current_subtask = info["subtask"]
            s.push({"type": "status", "state": state, **{
                k: v for k, v in info.items() if isinstance(v, (str, int, float))
            }})

    def on_prompt(self, role, messages):
        s = self.session
        with s.cond:
            s.prompts.append({
                "role": role,
                "messages": [{"role": m.role, "content": m.content} for m in messages],
            })

    def on_rollout(self, report, subtask_index, attempt):
        s = self.session
        traj = report.executed
        k = s.decimation
        with s.cond:
            s.attempt = attempt
            for i in range(0, len(traj), k):
                s.push({
                    "type": "sample", "subtask": subtask_index, "attempt": attempt,
                    "t": float(traj.times[i]),
                    "pose5": [float(v) for v in traj.poses[i]],
                    "z": float(traj.decay[i]),
                })
            if len(traj) and (len(traj) - 1) % k != 0:
                i = len(traj) - 1
                s.push({
                    "type": "sample", "subtask": subtask_index, "attempt": attempt,
                    "t": float(traj.times[i]),
                    "pose5": [float(v) for v in traj.poses[i]],
                    "z": float(traj.decay[i]),
                })
            for ev in report.events:
                s.push({"type": "event", "subtask": subtask_index, "attempt": attempt,
                        "event": ev.to_dict()})


class Session:
    def __init__(self, sid: str, task: str, scene, cfg: AppConfig, judge_mode: str):
        self.id = sid
        self.task = task
        self.cfg = cfg
        self.judge_mode = judge_mode
        self.state = "idle"
        self.current_subtask = None
        self.attempt = 0
        self.last_outcome = None
        self.prompts: list[dict] = []
        self.stream: list[dict] = []
        self.cond = threading.Condition()
        self.feedback_queue: queue.Queue = queue.Queue()
        self.report = None
        steps_per_second = cfg.dmp.steps_per_duration / cfg.dmp.duration
        self.decimation = max(1, round(steps_per_second / cfg.service.stream_max_rate_hz))
        self.sim = TabletopSim(scene, cfg.sim)
        judge = self._make_judge(judge_mode)
        self.runner = TaskSession(
            task, self.sim, make_backend(cfg.backend), judge,
            config=cfg.pipeline, dmp_config=cfg.dmp, noise=cfg.noise,
            observer=SessionObserver(self),
        )
        self.worker = threading.Thread(target=self._run, daemon=True)

    def _make_judge(self, mode: str) -> Judge:
        if mode == "interactive":
            return FeedbackJudge(self)
        if mode == "rules":
            return RuleJudge()
        return AcceptJudge()

    def push(self, record: dict):
        record["seq"] = len(self.stream)
        self.stream.append(record)
        self.cond.notify_all()

    def _run(self):
        try:
            self.report = self.runner.run_task()
        except Exception as exc:  # surface worker crashes to clients
            with self.cond:
                self.state = "failed"
                self.push({"type": "status", "state": "failed", "error": str(exc)})

    def start(self):
        self.worker.start()

    def finished(self) -> bool:
        return self.state in ("done", "failed")

    def status(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "task": self.task,
            "plan": [s.raw for s in self.runner.ctx.completed],
            "current_subtask": self.current_subtask,
            "attempt": self.attempt,
            "feedback_history": list(self.runner.ctx.feedback_history),
            "outcome": self.last_outcome,
            "success": self.report.success if self.report else None,
            "ee_pose": [float(v) for v in self.sim.state.ee_pose],
            "held": self.sim.state.held,
            "gripper_closed": self.sim.state.gripper_closed,
            "last_weights": (
                [[float(v) for v in row] for row in self.runner.ctx.last_weights]
                if self.runner.ctx.last_weights is not None else None
            ),
        }


def create_app(cfg: AppConfig, scenes_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="deskprim service")
    sessions: dict[str, Session] = {}
    lock = threading.Lock()

    def get_session(sid: str) -> Session:
        with lock:
            session = sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {sid}")
        return session

    def resolve_scene(spec):
        try:
            if isinstance(spec, dict):
                return scene_from_dict(spec)
            path = Path(spec)
            if not path.exists() and scenes_dir is not None:
                path = scenes_dir / spec
            if not path.exists():
                raise HTTPException(status_code=400, detail=f"scene not found: {spec}")
            return load_scene(path)
        except SceneFormatError as exc:
            raise HTTPException(status_code=400, detail=f"bad scene: {exc}") from exc

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)):
        if "task" not in body or "scene" not in body:
            raise HTTPException(status_code=400, detail="body needs scene and task")
        if cfg.backend is None and "fixtures" not in body:
            raise HTTPException(status_code=400, detail="no chat backend configured")
        session_cfg = cfg
        if "fixtures" in body:
            session_cfg = copy.copy(cfg)
            session_cfg.backend = BackendConfig.scripted(body["fixtures"])
        judge_mode = body.get("judge", cfg.judge)
        sid = uuid.uuid4().hex[:12]
        try:
            session = Session(sid, body["task"], resolve_scene(body["scene"]),
                              session_cfg, judge_mode)
        except (OSError, ValueError) as exc:  # e.g. unreadable fixture file
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        with lock:
            sessions[sid] = session
        session.start()
        return {"id": sid, "state": session.state}

    @app.get("/sessions/{sid}")
    def session_status(sid: str):
        return get_session(sid).status()

    @app.get("/sessions/{sid}/scene")
    def session_scene(sid: str):
        session = get_session(sid)
        return scene_to_dict(session.sim.state.scene)

    @app.get("/sessions/{sid}/prompts")
    def session_prompts(sid: str):
        session = get_session(sid)
        with session.cond:
            return {"prompts": list(session.prompts)}

    @app.get("/sessions/{sid}/report")
    def session_report(sid: str):
        session = get_session(sid)
        if session.report is None:
            raise HTTPException(status_code=409, detail="session still running")
        return session.report.to_dict()

    @app.get("/sessions/{sid}/rollout")
    def session_rollout(sid: str, start: int = 0):
        session = get_session(sid)

        def generate():
            cursor = start
            while True:
                with session.cond:
                    while cursor >= len(session.stream) and not session.finished():
                        session.cond.wait(timeout=0.25)
                    chunk = session.stream[cursor:]
                    done = session.finished() and cursor + len(chunk) >= len(session.stream)
                for record in chunk:
                    yield json.dumps(record, sort_keys=True) + "\n"
                cursor += len(chunk)
                if done:
                    return

        return StreamingResponse(generate(), media_type="application/x-ndjson")

    @app.post("/sessions/{sid}/feedback")
    def session_feedback(sid: str, body: dict = Body(...)):
        session = get_session(sid)
        if session.state != "awaiting_feedback":
            raise HTTPException(
                status_code=409,
                detail=f"feedback only accepted in awaiting_feedback (now: {session.state})",
            )
        session.feedback_queue.put(body.get("text", ""))
        return {"accepted": True}

    @app.post("/sessions/{sid}/reset")
    def session_reset(sid: str):
        old = get_session(sid)
        if not old.finished():
            raise HTTPException(status_code=409, detail="session still running")
        fresh = Session(old.id, old.task, scene_from_dict(old.runner.report.scene),
                        old.cfg, old.judge_mode)
        with lock:
            sessions[old.id] = fresh
        fresh.start()
        return {"id": fresh.id, "state": fresh.state}

    return app
