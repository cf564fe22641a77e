"""Server configuration: a flat JSON file plus PREGCARE_* env overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "./data"
    gateway_sink: str = ""  # defaults to <data_dir>/gateway.log
    gateway_failure_rate: float = 0.0
    gateway_seed: Optional[int] = None
    delivery_workers: int = 2
    retry_count: int = 2
    backoff_base_s: float = 0.05
    dedup_window_s: float = 120.0
    token_ttl_s: float = 3600.0
    ingress_key: str = ""  # empty disables the ingress auth check
    weekly_batch_weekday: int = 0  # Monday
    weekly_batch_hour: int = 8
    poll_interval_s: float = 2.0

    @property
    def sink_path(self) -> str:
        return self.gateway_sink or str(Path(self.data_dir) / "gateway.log")

    @property
    def db_path(self) -> str:
        return str(Path(self.data_dir) / "registration.db")

    @classmethod
    def load(cls, path: Optional[str] = None, env: Optional[dict] = None) -> "ServiceConfig":
        values: dict = {}
        if path:
            values.update(json.loads(Path(path).read_text(encoding="utf-8")))
        env = os.environ if env is None else env
        for field in dataclasses.fields(cls):
            key = f"PREGCARE_{field.name.upper()}"
            if key in env:
                raw = env[key]
                if field.type in ("int", int):
                    values[field.name] = int(raw)
                elif field.type in ("float", float):
                    values[field.name] = float(raw)
                elif field.name == "gateway_seed":
                    values[field.name] = int(raw) if raw != "" else None
                else:
                    values[field.name] = raw
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)
