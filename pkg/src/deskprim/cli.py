"""Command line entry points: run, replay, serve, plot, validate-scene."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import AppConfig
from .errors import DeskprimError, SceneFormatError
from .llm import BackendConfig, make_backend
from .pipeline import (
    AcceptJudge,
    CallbackJudge,
    RuleJudge,
    Subtask,
    TaskSession,
)
from .scene import load_scene
from .sim import TabletopSim, evaluate_subtask

EXIT_OK = 0
EXIT_TASK_FAILED = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deskprim",
        description="Movement-primitive tabletop pipeline driven by chat models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one task end to end")
    run.add_argument("--scene", required=True, help="scene JSON file")
    run.add_argument("--task", required=True, help="natural-language task")
    run.add_argument("--backend", choices=["scripted", "http"], default=None)
    run.add_argument("--fixtures", help="fixture file for the scripted backend")
    run.add_argument("--base-url", help="chat endpoint base URL (http backend)")
    run.add_argument("--model", help="model name (http backend)")
    run.add_argument("--judge", choices=["accept", "rules", "interactive"], default=None)
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--out", default="out", help="output directory")

    replay = sub.add_parser("replay", help="re-execute a recorded report")
    replay.add_argument("--report", required=True)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--config", help="JSON config file")
    serve.add_argument("--scenes-dir", default="scenarios/scenes",
                       help="directory resolved for scene names in POST /sessions")

    plot = sub.add_parser("plot", help="render path plots from a report")
    plot.add_argument("--report", required=True)
    plot.add_argument("--out", default="plots")

    validate = sub.add_parser("validate-scene", help="check a scene file")
    validate.add_argument("--scene", required=True)
    return parser


def _load_config(args) -> AppConfig:
    cfg = AppConfig.from_file(args.config) if getattr(args, "config", None) else AppConfig()
    backend_kind = getattr(args, "backend", None)
    if backend_kind == "scripted":
        if not args.fixtures:
            raise DeskprimError("--backend scripted requires --fixtures")
        cfg.backend = BackendConfig.scripted(args.fixtures)
    elif backend_kind == "http":
        if not (args.base_url and args.model):
            raise DeskprimError("--backend http requires --base-url and --model")
        cfg.backend = BackendConfig(kind="http", base_url=args.base_url, model=args.model)
    if getattr(args, "judge", None):
        cfg.judge = args.judge
    if cfg.backend is None:
        raise DeskprimError("no chat backend configured (use --backend or a config file)")
    return cfg


def _terminal_judge(report, subtask, outcome):
    status = "succeeded" if outcome and outcome.success else f"failed: {outcome.reason}"
    print(f"subtask {subtask.raw} {status}")
    return input("feedback (empty accepts): ")


def make_judge(name: str):
    if name == "accept":
        return AcceptJudge()
    if name == "rules":
        return RuleJudge()
    if name == "interactive":
        return CallbackJudge(_terminal_judge)
    raise DeskprimError(f"unknown judge mode {name!r}")


def write_report(report, out_dir: Path) -> Path:
    """Write report.json plus one trajectory CSV per attempt."""
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = report.to_dict()
    for si, sub in enumerate(report.subtasks):
        for ai, attempt in enumerate(sub.attempts):
            rec = doc["subtasks"][si]["attempts"][ai]
            if attempt.trajectory is None:
                continue
            name = f"subtask{si:02d}_attempt{ai + 1}.csv"
            (out_dir / name).write_text(attempt.trajectory.to_csv())
            rec["trajectory_csv"] = name
            rec["trajectory_meta"] = {
                "duration": attempt.trajectory.duration,
                "dt": attempt.trajectory.dt,
                "n_samples": len(attempt.trajectory),
            }
    path = out_dir / "report.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))
    return path


def cmd_run(args) -> int:
    try:
        cfg = _load_config(args)
        scene = load_scene(args.scene)
    except (DeskprimError, OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sim = TabletopSim(scene, cfg.sim)
    backend = make_backend(cfg.backend)
    session = TaskSession(
        args.task, sim, backend, make_judge(cfg.judge),
        config=cfg.pipeline, dmp_config=cfg.dmp, noise=cfg.noise,
    )
    report = session.run_task()
    path = write_report(report, Path(args.out))
    print(f"task {'succeeded' if report.success else 'failed'} "
          f"(status: {report.status}); report: {path}")
    return EXIT_OK if report.success else EXIT_TASK_FAILED


def cmd_replay(args) -> int:
    from .dmp import Trajectory
    from .scene import scene_from_dict

    report_path = Path(args.report)
    try:
        doc = json.loads(report_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: cannot read report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    scene = scene_from_dict(doc["scene"])
    sim = TabletopSim(scene)
    mismatches = []
    for si, sub in enumerate(doc["subtasks"]):
        subtask = Subtask(**sub["subtask"])
        for ai, attempt in enumerate(sub["attempts"]):
            if "trajectory_csv" not in attempt:
                continue
            csv_text = (report_path.parent / attempt["trajectory_csv"]).read_text()
            traj = Trajectory.from_csv(csv_text, attempt["trajectory_meta"]["duration"])
            snap = sim.snapshot()
            exec_report = sim.execute_trajectory(traj)
            outcome = evaluate_subtask(snap, sim.state, subtask, exec_report)
            recorded = attempt["outcome"]
            if outcome.to_dict() != recorded:
                mismatches.append((si, ai, outcome.to_dict(), recorded))
            rejected = attempt.get("feedback")
            if rejected:
                sim.restore(snap)
    if mismatches:
        for si, ai, got, want in mismatches:
            print(f"subtask {si} attempt {ai + 1}: replay {got} != recorded {want}",
                  file=sys.stderr)
        return EXIT_TASK_FAILED
    print(f"replay reproduced {sum(len(s['attempts']) for s in doc['subtasks'])} "
          "attempt outcomes exactly")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    try:
        cfg = AppConfig.from_file(args.config) if args.config else AppConfig()
    except (OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    host = args.host or cfg.service.host
    port = args.port if args.port is not None else cfg.service.port
    app = create_app(cfg, scenes_dir=Path(args.scenes_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import export_plot

    try:
        written = export_plot(args.report, args.out)
    except (OSError, KeyError, ValueError) as exc:
        print(f"cannot plot report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {len(written)} figure(s) to {args.out}")
    return EXIT_OK


def cmd_validate_scene(args) -> int:
    try:
        scene = load_scene(args.scene)
    except SceneFormatError as exc:
        print(f"invalid scene: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"scene ok: {len(scene.objects)} object(s), "
          f"table at z={scene.table_height}, "
          f"workspace {scene.workspace.min.tolist()}..{scene.workspace.max.tolist()}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "replay": cmd_replay,
        "serve": cmd_serve,
        "plot": cmd_plot,
        "validate-scene": cmd_validate_scene,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
