"""Service configuration: one file holds every default, environment variables
override it."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class ServiceConfig:
    project_root: str = "projects"
    tcp_port: int = 8080
    http_port: int = 8081
    budget_s: float = 30.0
    upload_tokens: List[str] = field(default_factory=list)
    max_concurrent: int = 4
    status_trailer: bool = False      # emit the Loadavg trailer line
    replay_token: str = "SUGGESTED"   # 'SUCCESS' for drop-in wire compatibility
    provers_file: Optional[str] = None
    strategies_file: Optional[str] = None

    def __post_init__(self):
        if self.budget_s <= 0:
            raise ValueError("budget must be positive")
        if self.tcp_port == self.http_port:
            raise ValueError("TCP and HTTP ports must differ")

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        return cls(**data).with_env()

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        return cls().with_env()

    def with_env(self) -> "ServiceConfig":
        env = os.environ
        if "HAMMER_PROJECT_ROOT" in env:
            self.project_root = env["HAMMER_PROJECT_ROOT"]
        if "HAMMER_TCP_PORT" in env:
            self.tcp_port = int(env["HAMMER_TCP_PORT"])
        if "HAMMER_HTTP_PORT" in env:
            self.http_port = int(env["HAMMER_HTTP_PORT"])
        if "HAMMER_BUDGET" in env:
            self.budget_s = float(env["HAMMER_BUDGET"])
        if "HAMMER_TOKENS" in env:
            self.upload_tokens = [t for t in env["HAMMER_TOKENS"].split(",") if t]
        if "HAMMER_PROVERS" in env:
            self.provers_file = env["HAMMER_PROVERS"]
        self.__post_init__()
        return self
