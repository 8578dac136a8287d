"""Unified runtime configuration.

One JSON file overlays the engine, simulator, pipeline, perception-noise
and backend defaults; anything omitted keeps its built-in value. API keys
never live in the file, only the name of the environment variable that
holds them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .dmp import DmpConfig
from .llm import BackendConfig
from .perception import NoiseConfig
from .pipeline import PipelineConfig
from .sim import SimConfig


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8431
    stream_max_rate_hz: float = 60.0


def _overlay(base, data: dict):
    if not data:
        return base
    names = {f.name for f in fields(base)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown {type(base).__name__} keys: {sorted(unknown)}")
    coerced = {}
    for key, val in data.items():
        if isinstance(val, list):
            val = tuple(val)
        coerced[key] = val
    return replace(base, **coerced)


@dataclass
class AppConfig:
    dmp: DmpConfig = field(default_factory=DmpConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    backend: BackendConfig | None = None
    judge: str = "accept"

    @classmethod
    def from_dict(cls, data: dict) -> "AppConfig":
        cfg = cls()
        cfg.dmp = _overlay(cfg.dmp, data.get("dmp", {}))
        cfg.sim = _overlay(cfg.sim, data.get("sim", {}))
        cfg.pipeline = _overlay(cfg.pipeline, data.get("pipeline", {}))
        cfg.noise = _overlay(cfg.noise, data.get("noise", {}))
        cfg.service = _overlay(cfg.service, data.get("service", {}))
        if "backend" in data:
            cfg.backend = BackendConfig(**data["backend"])
        cfg.judge = data.get("judge", cfg.judge)
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "AppConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))
