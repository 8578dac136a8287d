"""Task orchestration: decompose, generate, execute, judge, refine.

One task runs as a loop. The decomposer model proposes the next subtask
template from the scene text and history; the generator model emits a
5xB weight matrix plus goal offsets for that subtask; the simulator rolls
the resulting primitive out; a judge (human or scripted) either accepts
the attempt or returns a natural-language correction, in which case the
world is reset to the subtask's start and the generator is re-prompted
with its past weights and the full correction history.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import scene as scene_mod
from .dmp import DmpConfig, GRIP, Trajectory, rollout, specs_from_weights
from .errors import (
    DeskprimError,
    FixtureMissError,
    GeneratorOutputError,
    ObjectResolutionError,
    RequestError,
    SubtaskParseError,
    TransportError,
    WorkspaceError,
)
from .llm import ChatMessage
from .perception import DetectedObject, NoiseConfig, object_list_text, perceive
from .sim import Outcome, TabletopSim, evaluate_subtask

logger = logging.getLogger(__name__)

TEMPLATE_KINDS = ("reach", "carry", "wiping", "release", "done")


def _load_template(name: str) -> str:
    return resources.files("deskprim").joinpath(f"prompts/{name}.txt").read_text()


@dataclass(frozen=True)
class Subtask:
    """Parsed instance of one subtask template."""

    kind: str
    target: str | None = None
    destination: str | None = None
    avoidance_note: str | None = None
    raw: str = ""

    def describe(self) -> str:
        if self.kind == "done":
            return "done"
        if self.kind == "carry":
            s = f"carry the {self.target} to the {self.destination}"
            if self.avoidance_note:
                s += f" ({self.avoidance_note})"
            return s
        verb = {"reach": "reach and grasp", "wiping": "wipe", "release": "release"}[self.kind]
        return f"{verb} the {self.target}"


@dataclass
class GeneratorOutput:
    """Validated generator action: weight matrix plus goal offsets."""

    weights: np.ndarray
    angle: float
    height: float
    warnings: list[str] = field(default_factory=list)


@dataclass
class PipelineConfig:
    basis_count: int = 11
    dimensions: int = 5
    retry_cap: int = 3
    subtask_cap: int = 10
    position_weight_limit: float = 0.9
    gripper_weight_limit: float = 1.0
    release_duration_factor: float = 0.5
    reprompt_on_parse_error: bool = True


DEFAULT_PIPELINE_CONFIG = PipelineConfig()

_ANSWER_RE = re.compile(r"<answer>(.*?)</answer>", re.IGNORECASE | re.DOTALL)
_FENCE_RE = re.compile(r"```[a-zA-Z]*\n?(.*?)```", re.DOTALL)

_PATTERNS = {
    "reach": re.compile(r"^REACH\s*\(\s*(?P<obj>[^)]+?)\s*\)\s*\.?$", re.IGNORECASE),
    "carry": re.compile(
        r"^CARRY\s*\(\s*(?P<obj>[^)]+?)\s*\)\s*to\s*\(\s*(?P<dest>[^)]+?)\s*\)"
        r"\s*(?:[,.]\s*(?P<note>.+?))?\s*$",
        re.IGNORECASE | re.DOTALL,
    ),
    "wiping": re.compile(r"^WIPING\s*\(\s*(?P<obj>[^)]+?)\s*\)\s*\.?$", re.IGNORECASE),
    "release": re.compile(r"^RELEASE\s*\(\s*(?P<obj>[^)]+?)\s*\)\s*\.?$", re.IGNORECASE),
}


def _resolve_object(name: str, labels: list[str]) -> str:
    name = name.strip()
    if name in labels:
        return name
    lowered = [l for l in labels if l.lower() == name.lower()]
    if len(lowered) == 1:
        return lowered[0]
    subs = [l for l in labels if name.lower() in l.lower() or l.lower() in name.lower()]
    if len(subs) == 1:
        return subs[0]
    if not subs:
        raise ObjectResolutionError(
            f"no detected object matches {name!r} (have: {', '.join(sorted(labels))})",
            candidates=sorted(labels),
        )
    raise ObjectResolutionError(
        f"object name {name!r} is ambiguous between {sorted(subs)}", candidates=sorted(subs)
    )


def parse_subtask(answer: str, detections) -> Subtask:
    """Parse a decomposer answer into a template instance.

    The ``<answer>`` block is extracted when present (reasoning blocks are
    discarded); matching is case-insensitive; object names are resolved
    against the detection labels by exact match first, then unique
    substring.
    """
    m = _ANSWER_RE.search(answer)
    text = (m.group(1) if m else answer).strip()
    if text.lower().rstrip(".") == "done":
        return Subtask(kind="done", raw=text)
    labels = [d.label for d in detections]
    for kind, pattern in _PATTERNS.items():
        m = pattern.match(text)
        if not m:
            continue
        target = _resolve_object(m.group("obj"), labels)
        if kind == "carry":
            dest = _resolve_object(m.group("dest"), labels)
            note = (m.group("note") or "").strip() or None
            return Subtask(kind=kind, target=target, destination=dest,
                           avoidance_note=note, raw=text)
        return Subtask(kind=kind, target=target, raw=text)
    raise SubtaskParseError(f"answer matches no subtask template: {text!r}", raw=text)


def parse_generator_output(text: str, basis_count: int, dimensions: int = 5,
                           config: PipelineConfig = DEFAULT_PIPELINE_CONFIG) -> GeneratorOutput:
    """Parse and validate the generator's JSON action.

    Code fences are stripped if the model ignored the formatting
    instructions. Out-of-range weights are clamped to their row limits
    with a recorded warning rather than rejected.
    """
    body = text.strip()
    fences = _FENCE_RE.findall(body)
    if fences:
        body = fences[0].strip()
    start, end = body.find("{"), body.rfind("}")
    if start == -1 or end <= start:
        raise GeneratorOutputError(f"no JSON object in generator response: {text[:200]!r}")
    try:
        data = json.loads(body[start:end + 1])
    except json.JSONDecodeError as exc:
        raise GeneratorOutputError(f"malformed JSON from generator: {exc}") from exc
    if not isinstance(data, dict) or "weights" not in data:
        raise GeneratorOutputError("generator JSON must be an object with a 'weights' key")
    try:
        weights = np.asarray(data["weights"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise GeneratorOutputError(f"weights are not numeric: {exc}") from exc
    if weights.shape != (dimensions, basis_count):
        raise GeneratorOutputError(
            f"expected {dimensions}x{basis_count} weights, got {weights.shape}"
        )
    try:
        angle = float(data.get("angle", 0.0))
        height = float(data.get("height", 0.0))
    except (TypeError, ValueError) as exc:
        raise GeneratorOutputError(f"angle/height are not numbers: {exc}") from exc

    warnings = []
    clamped = weights.copy()
    for row in range(dimensions):
        is_grip = dimensions == 5 and row == GRIP
        limit = config.gripper_weight_limit if is_grip else config.position_weight_limit
        over = np.abs(weights[row]) > limit
        if over.any():
            for col in np.flatnonzero(over):
                warnings.append(
                    f"weight[{row}][{col}] = {weights[row][col]:.3g} clamped to +-{limit}"
                )
            clamped[row] = np.clip(weights[row], -limit, limit)
    if warnings:
        logger.warning("generator weights clamped: %s", "; ".join(warnings))
    if not np.isfinite(clamped).all() or not np.isfinite([angle, height]).all():
        raise GeneratorOutputError("generator output contains non-finite values")
    return GeneratorOutput(weights=clamped, angle=angle, height=height, warnings=warnings)


# -- prompt rendering -------------------------------------------------------


@dataclass
class SceneFields:
    """Values substituted into the generator's scene prompt."""

    initial_tcp_position: str
    goal_obj_name: str
    movable_objects: str
    robot_base_position: str = "(0.000, 0.000, 0.000)"
    robot_base_orientation: str = "(0.000, 0.000, 0.000)"
    initial_tcp_velocities: str = "(0.000, 0.000, 0.000)"


@dataclass
class FollowupFields:
    past_weights: str
    history: str
    movable_objects: str
    action_plan: str


def _fmt_vec(v) -> str:
    return "(" + ", ".join(f"{float(x):.3f}" for x in v) + ")"


def render_decomposer_prompt(task: str, detections_text: str,
                             completed: list[Subtask]) -> list[ChatMessage]:
    prior = "\n".join(s.raw for s in completed) if completed else "none"
    system = _load_template("decomposer_system").replace("<OVERALL_TASK>", task)
    user = (
        _load_template("decomposer_user")
        .replace("<OVERALL_TASK>", task)
        .replace("<OBJ_LIST>", detections_text)
        .replace("<PRIOR_TASKS>", prior)
    )
    return [ChatMessage("system", system), ChatMessage("user", user)]


def render_generator_prompts(subtask: Subtask, fields: SceneFields,
                             config: PipelineConfig = DEFAULT_PIPELINE_CONFIG,
                             followup: FollowupFields | None = None) -> list[ChatMessage]:
    subs = {
        "total_weights": str(config.dimensions * config.basis_count),
        "dimensions": str(config.dimensions),
        "num_functions": str(config.basis_count),
        "robot_base_position": fields.robot_base_position,
        "robot_base_orientation": fields.robot_base_orientation,
        "initial_tcp_position": fields.initial_tcp_position,
        "initial_tcp_velocities": fields.initial_tcp_velocities,
        "goal_obj_name": fields.goal_obj_name,
        "movable_objects": fields.movable_objects,
        "task": subtask.raw,
    }

    def fill(template: str, extra: dict | None = None) -> str:
        values = dict(subs, **(extra or {}))
        out = template
        for key, val in values.items():
            out = out.replace("${." + key + "}", val)
        return out

    messages = [
        ChatMessage("system", fill(_load_template("generator_system"))),
        ChatMessage("user", fill(_load_template("generator_scene"))),
        ChatMessage("user", fill(_load_template("generator_task"))),
    ]
    if followup is not None:
        messages.append(ChatMessage("user", fill(
            _load_template("generator_followup"),
            {
                "past_weights": followup.past_weights,
                "history": followup.history,
                "movable_objects": followup.movable_objects,
                "action_plan": followup.action_plan,
            },
        )))
    return messages


# -- judges ------------------------------------------------------------------


class Judge:
    """Feedback source; returning None or "" accepts the attempt."""

    def judge(self, report, subtask: Subtask, outcome: Outcome | None = None) -> str | None:
        raise NotImplementedError


class AcceptJudge(Judge):
    def judge(self, report, subtask, outcome=None):
        return None


_DEFAULT_RULES = {
    "collision": "you hit the {label}, lift higher in the middle of the motion and steer around it",
    "no_grasp": "too high, you missed the {target}",
    "wrong_object": "you grasped the wrong object, aim for the {target}",
    "missed_target": "the {target} ended up too far away, carry it all the way to the {destination}",
    "dropped": "you dropped the {target} on the way",
    "still_held": "open the gripper to let go of the {target}",
    "not_resting": "the {target} did not land anywhere stable",
    "coverage": "you barely wiped the {target}, move in a full circle around it",
    "no_tool": "pick up something to wipe with first",
    "aborted": "the arm left the workspace, keep the motion smaller",
    "workspace": "that goal is out of reach, bring the height offset down",
}


class RuleJudge(Judge):
    """Deterministic canned feedback keyed on the failure kind."""

    def __init__(self, rules: dict | None = None):
        self.rules = dict(_DEFAULT_RULES, **(rules or {}))

    def judge(self, report, subtask, outcome=None):
        if outcome is None or outcome.success:
            return None
        label = ""
        if outcome.kind == "collision" and report.collisions():
            label = report.collisions()[0].label
        template = self.rules.get(outcome.kind, "that attempt failed: {reason}")
        return template.format(
            label=label,
            target=subtask.target or "",
            destination=subtask.destination or "",
            reason=outcome.reason,
        )


class CallbackJudge(Judge):
    """Adapts a callable (terminal prompt, HTTP wait) into the judge slot."""

    def __init__(self, fn):
        self.fn = fn

    def judge(self, report, subtask, outcome=None):
        text = self.fn(report, subtask, outcome)
        return text.strip() if text and text.strip() else None


# -- session -----------------------------------------------------------------


class PipelineObserver:
    """No-op hooks; the service layer overrides what it needs."""

    def on_state(self, state: str, **info):
        pass

    def on_prompt(self, role: str, messages: list[ChatMessage]):
        pass

    def on_response(self, role: str, text: str):
        pass

    def on_rollout(self, report, subtask_index: int, attempt: int):
        pass


@dataclass
class SessionContext:
    """Mutable state of one task run."""

    task: str
    completed: list[Subtask] = field(default_factory=list)
    feedback_history: list[str] = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    config: PipelineConfig = field(default_factory=PipelineConfig)
    dmp_config: DmpConfig = DmpConfig()
    noise: NoiseConfig = NoiseConfig()
    last_weights: np.ndarray | None = None
    last_outcome: Outcome | None = None
    last_report: object = None

    def begin_subtask(self):
        self.feedback_history = []
        self.last_weights = None
        self.last_outcome = None
        self.last_report = None


@dataclass
class AttemptRecord:
    prompts: list[dict]
    response: str
    weights: list | None
    angle: float | None
    height: float | None
    warnings: list[str]
    outcome: dict
    events: list[dict]
    feedback: str | None = None
    trajectory: Trajectory | None = None

    def to_dict(self) -> dict:
        return {
            "prompts": self.prompts,
            "response": self.response,
            "weights": self.weights,
            "angle": self.angle,
            "height": self.height,
            "warnings": self.warnings,
            "outcome": self.outcome,
            "events": self.events,
            "feedback": self.feedback,
        }


@dataclass
class SubtaskRecord:
    subtask: Subtask
    decomposer_prompts: list[dict]
    decomposer_response: str
    attempts: list[AttemptRecord] = field(default_factory=list)
    accepted: bool = False

    @property
    def feedback_rounds(self) -> int:
        return sum(1 for a in self.attempts if a.feedback)

    def to_dict(self) -> dict:
        return {
            "subtask": {
                "kind": self.subtask.kind,
                "target": self.subtask.target,
                "destination": self.subtask.destination,
                "avoidance_note": self.subtask.avoidance_note,
                "raw": self.subtask.raw,
            },
            "decomposer_prompts": self.decomposer_prompts,
            "decomposer_response": self.decomposer_response,
            "attempts": [a.to_dict() for a in self.attempts],
            "accepted": self.accepted,
            "feedback_rounds": self.feedback_rounds,
        }


@dataclass
class TaskReport:
    task: str
    scene: dict
    subtasks: list[SubtaskRecord] = field(default_factory=list)
    status: str = "incomplete"
    success: bool = False
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "scene": self.scene,
            "status": self.status,
            "success": self.success,
            "error": self.error,
            "subtasks": [s.to_dict() for s in self.subtasks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _messages_to_dicts(messages: list[ChatMessage]) -> list[dict]:
    return [{"role": m.role, "content": m.content} for m in messages]


def build_action_plan(outcome: Outcome, report, feedback: str) -> str:
    """Heuristic trial analysis fed into the follow-up prompt."""
    lines = [feedback]
    if report is not None:
        for e in report.collisions():
            stage = "early" if e.phase < 0.35 else ("middle" if e.phase < 0.7 else "late")
            lines.append(
                f"Collision with the {e.label} during the {stage} part of the trajectory "
                f"(phase {e.phase:.2f})."
            )
        if report.aborted:
            lines.append(f"The execution aborted: {report.aborted}.")
    if outcome is not None and not outcome.success and outcome.kind not in ("collision",):
        lines.append(f"Failure: {outcome.reason}.")
    return "\n".join(lines)


class TaskSession:
    """Runs one task against a simulator through a chat backend.

    The backend is any object with ``complete(messages) -> str``; the
    scripted fixture backend makes the whole loop deterministic.
    """

    def __init__(self, task: str, sim: TabletopSim, backend, judge: Judge,
                 config: PipelineConfig | None = None,
                 dmp_config: DmpConfig | None = None,
                 noise: NoiseConfig | None = None,
                 observer: PipelineObserver | None = None):
        self.sim = sim
        self.backend = backend
        self.judge = judge
        self.observer = observer or PipelineObserver()
        self.ctx = SessionContext(
            task=task,
            config=config or PipelineConfig(),
            dmp_config=dmp_config or DmpConfig(),
            noise=noise or NoiseConfig(),
        )
        self.report = TaskReport(task=task, scene=scene_mod.scene_to_dict(sim.state.scene))

    # -- single subtask attempt -------------------------------------------

    def _goal_for(self, subtask: Subtask, detections, gen: GeneratorOutput):
        st = self.sim.state
        by_label = {d.label: d for d in detections}
        if subtask.kind == "release":
            ee = st.ee_pose
            goal_xyz = np.array([ee[0], ee[1], ee[2] + gen.height])
            goal_yaw = scene_mod.normalize_angle(ee[5] + gen.angle)
            return goal_xyz, goal_yaw
        ref_label = subtask.destination if subtask.kind == "carry" else subtask.target
        if ref_label not in by_label:
            raise ObjectResolutionError(
                f"{ref_label!r} is not visible to perception", candidates=sorted(by_label)
            )
        target = by_label[ref_label]
        goal = scene_mod.compose_goal(
            target, gen.height, gen.angle,
            (st.ee_pose[3], st.ee_pose[4]), st.scene.workspace,
        )
        return goal.xyz, goal.yaw

    def run_subtask(self, subtask: Subtask) -> AttemptRecord:
        """One generator round: prompt, parse, roll out, execute, evaluate."""
        ctx = self.ctx
        cfg = ctx.config
        sim = self.sim
        ctx.snapshots.append(sim.snapshot())

        self.observer.on_state("awaiting_generation", subtask=subtask.raw)
        detections = perceive(sim.state, ctx.noise)
        objects_text = object_list_text(detections)
        st = sim.state
        fields = SceneFields(
            initial_tcp_position=_fmt_vec(st.ee_pose[:3]),
            goal_obj_name=(subtask.destination if subtask.kind == "carry" else subtask.target)
            or "goal",
            movable_objects=objects_text,
        )
        followup = None
        if ctx.feedback_history and ctx.last_weights is not None:
            followup = FollowupFields(
                past_weights=json.dumps([[round(float(w), 6) for w in row]
                                         for row in ctx.last_weights]),
                history="\n".join(
                    f"trial {i + 1}: {fb}" for i, fb in enumerate(ctx.feedback_history)
                ),
                movable_objects=objects_text,
                action_plan=build_action_plan(
                    ctx.last_outcome, ctx.last_report, ctx.feedback_history[-1]
                ),
            )
        messages = render_generator_prompts(subtask, fields, cfg, followup)
        self.observer.on_prompt("generator", messages)

        response = self.backend.complete(messages)
        self.observer.on_response("generator", response)
        try:
            gen = parse_generator_output(response, cfg.basis_count, cfg.dimensions, cfg)
        except GeneratorOutputError as exc:
            if not cfg.reprompt_on_parse_error:
                raise
            retry_messages = messages + [
                ChatMessage("assistant", response or "(empty response)"),
                ChatMessage(
                    "user",
                    f"Your previous response could not be parsed: {exc}. "
                    "Reply with only the JSON object.",
                ),
            ]
            self.observer.on_prompt("generator", retry_messages)
            response = self.backend.complete(retry_messages)
            self.observer.on_response("generator", response)
            gen = parse_generator_output(response, cfg.basis_count, cfg.dimensions, cfg)

        ctx.last_weights = gen.weights
        goal_xyz, goal_yaw = self._goal_for(subtask, detections, gen)
        grip_start = 1.0 if st.held is not None else 0.0
        grip_goal = 0.0 if subtask.kind == "release" else 1.0
        starts = np.array([*st.ee_pose[:3], st.ee_pose[5], grip_start])
        goals = np.array([*goal_xyz, goal_yaw, grip_goal])

        dmp_cfg = ctx.dmp_config
        if subtask.kind == "release":
            dmp_cfg = dmp_cfg.with_duration(dmp_cfg.duration * cfg.release_duration_factor)
        specs = specs_from_weights(gen.weights, starts, goals, dmp_cfg)
        trajectory = rollout(specs, dmp_cfg.dt, dmp_cfg)

        self.observer.on_state("executing", subtask=subtask.raw)
        exec_report = sim.execute_trajectory(trajectory)
        outcome = evaluate_subtask(ctx.snapshots[-1], sim.state, subtask, exec_report,
                                   sim.config)
        self.observer.on_rollout(exec_report, len(self.report.subtasks),
                                 len(ctx.feedback_history))

        ctx.last_outcome = outcome
        ctx.last_report = exec_report
        return AttemptRecord(
            prompts=_messages_to_dicts(messages),
            response=response,
            weights=[[float(w) for w in row] for row in gen.weights],
            angle=gen.angle,
            height=gen.height,
            warnings=gen.warnings,
            outcome=outcome.to_dict(),
            events=[e.to_dict() for e in exec_report.events],
            # the full reference, not the (possibly aborted) executed slice,
            # so a replay re-executes and re-aborts identically
            trajectory=trajectory,
        )

    def apply_feedback(self, feedback: str) -> None:
        """Record a correction and reset the world to the subtask's start."""
        ctx = self.ctx
        ctx.feedback_history.append(feedback)
        if not ctx.snapshots:
            raise DeskprimError("no subtask attempt to reset")
        self.sim.restore(ctx.snapshots.pop())

    # -- full task ----------------------------------------------------------

    def run_task(self) -> TaskReport:
        ctx = self.ctx
        cfg = ctx.config
        report = self.report
        try:
            while True:
                if len(report.subtasks) >= cfg.subtask_cap:
                    report.status = "subtask-cap"
                    break
                self.observer.on_state("planning")
                detections = perceive(self.sim.state, ctx.noise)
                dec_messages = render_decomposer_prompt(
                    ctx.task, object_list_text(detections), ctx.completed
                )
                self.observer.on_prompt("decomposer", dec_messages)
                dec_response = self.backend.complete(dec_messages)
                self.observer.on_response("decomposer", dec_response)
                # the held object is hidden from perception but stays
                # addressable by name (e.g. CARRY of what was just grasped)
                resolvable = list(detections)
                if self.sim.state.held is not None:
                    held_obj = self.sim.state.scene.find(self.sim.state.held)
                    resolvable.append(DetectedObject(
                        label=held_obj.label, position=held_obj.position.copy(),
                        yaw=held_obj.yaw, extents=held_obj.extents.copy(),
                    ))
                subtask = parse_subtask(dec_response, resolvable)
                if subtask.kind == "done":
                    report.status = "done"
                    report.success = all(
                        rec.accepted and rec.attempts and rec.attempts[-1].outcome["success"]
                        for rec in report.subtasks
                    )
                    break

                record = SubtaskRecord(
                    subtask=subtask,
                    decomposer_prompts=_messages_to_dicts(dec_messages),
                    decomposer_response=dec_response,
                )
                report.subtasks.append(record)
                ctx.begin_subtask()
                while True:
                    try:
                        attempt = self.run_subtask(subtask)
                    except WorkspaceError as exc:
                        # a bad goal offset is a correctable attempt, not a
                        # pipeline defect: let the judge send it back
                        outcome = Outcome(False, kind="workspace", reason=str(exc))
                        ctx.last_outcome = outcome
                        ctx.last_report = None
                        attempt = AttemptRecord(
                            prompts=[], response="", weights=None, angle=None,
                            height=None, warnings=[], outcome=outcome.to_dict(),
                            events=[],
                        )
                    except (GeneratorOutputError, TransportError, RequestError,
                            FixtureMissError, ObjectResolutionError) as exc:
                        record.attempts.append(AttemptRecord(
                            prompts=[], response="", weights=None, angle=None,
                            height=None, warnings=[],
                            outcome=Outcome(False, kind=type(exc).__name__,
                                            reason=str(exc)).to_dict(),
                            events=[],
                        ))
                        report.status = "pipeline-error"
                        report.success = False
                        report.error = str(exc)
                        return self._finish(report)
                    record.attempts.append(attempt)
                    self.observer.on_state("awaiting_feedback", subtask=subtask.raw,
                                           outcome=attempt.outcome)
                    feedback = self.judge.judge(ctx.last_report, subtask, ctx.last_outcome)
                    if not feedback:
                        record.accepted = True
                        ctx.completed.append(subtask)
                        break
                    attempt.feedback = feedback
                    if len(ctx.feedback_history) >= cfg.retry_cap:
                        report.status = "failed-after-retries"
                        report.success = False
                        return self._finish(report)
                    self.apply_feedback(feedback)
        except (SubtaskParseError, ObjectResolutionError) as exc:
            report.status = "decomposer-error"
            report.success = False
            report.error = str(exc)
        except (GeneratorOutputError, TransportError, RequestError, FixtureMissError) as exc:
            report.status = "pipeline-error"
            report.success = False
            report.error = str(exc)
        return self._finish(report)

    def _finish(self, report: TaskReport) -> TaskReport:
        if report.status == "incomplete":
            report.status = "stopped"
        self.observer.on_state("done" if report.success else "failed", status=report.status)
        return report
