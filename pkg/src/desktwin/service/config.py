"""Service configuration: JSON file with environment-variable overrides.

Environment variables (all optional) override file values:
DESKTWIN_HOST, DESKTWIN_PORT, DESKTWIN_SCENE, DESKTWIN_BACKEND_KIND,
DESKTWIN_BACKEND_URL, DESKTWIN_BACKEND_MODEL, DESKTWIN_API_KEY,
DESKTWIN_SESSION_TTL.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..agents.backend import ChatBackend, LiveBackend
from ..agents.mock_rules import make_default_mock
from ..errors import FormatError


@dataclass
class ServiceConfig:
    scene_path: str
    catalog_path: str | None = None  # overrides the scene's catalog_ref
    host: str = "127.0.0.1"
    port: int = 8732
    session_ttl_s: float = 3600.0
    backend_kind: str = "mock"
    backend_url: str = ""
    backend_model: str = ""
    backend_api_key: str | None = None
    backend_temperature: float = 0.0

    def __post_init__(self):
        if self.backend_kind not in ("mock", "live"):
            raise ValueError("backend kind must be 'mock' or 'live'")
        if self.backend_kind == "live" and not (self.backend_url
                                                and self.backend_model):
            raise ValueError("live backend needs backend_url and backend_model")
        if self.session_ttl_s <= 0:
            raise ValueError("session_ttl_s must be positive")

    def make_backend(self) -> ChatBackend:
        if self.backend_kind == "mock":
            return make_default_mock()
        return LiveBackend(endpoint=self.backend_url, model=self.backend_model,
                           api_key=self.backend_api_key,
                           temperature=self.backend_temperature)


def load_config(path: str | os.PathLike | None = None,
                env: dict | None = None) -> ServiceConfig:
    env = env if env is not None else os.environ
    doc: dict = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise FormatError(f"config is not valid JSON: {e}") from e
    backend = doc.get("backend", {})

    def pick(env_key, file_value, default, cast=str):
        if env_key in env:
            return cast(env[env_key])
        if file_value is not None:
            return cast(file_value)
        return default

    scene_path = pick("DESKTWIN_SCENE", doc.get("scene_path"), None)
    if not scene_path:
        raise FormatError("config must provide scene_path "
                          "(or DESKTWIN_SCENE)")
    return ServiceConfig(
        scene_path=scene_path,
        catalog_path=pick("DESKTWIN_CATALOG", doc.get("catalog_path"), None),
        host=pick("DESKTWIN_HOST", doc.get("host"), "127.0.0.1"),
        port=pick("DESKTWIN_PORT", doc.get("port"), 8732, int),
        session_ttl_s=pick("DESKTWIN_SESSION_TTL", doc.get("session_ttl_s"),
                           3600.0, float),
        backend_kind=pick("DESKTWIN_BACKEND_KIND", backend.get("kind"), "mock"),
        backend_url=pick("DESKTWIN_BACKEND_URL", backend.get("url"), ""),
        backend_model=pick("DESKTWIN_BACKEND_MODEL", backend.get("model"), ""),
        backend_api_key=pick("DESKTWIN_API_KEY", backend.get("api_key"), None),
        backend_temperature=pick("DESKTWIN_BACKEND_TEMPERATURE",
                                 backend.get("temperature"), 0.0, float),
    )
