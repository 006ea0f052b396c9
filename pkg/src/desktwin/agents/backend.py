"""Chat backends: a deterministic mock for tests and benchmarks, and an
OpenAI-style chat-completions client for live models."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..errors import BackendError
from .prompts import EngineeredPrompt

FENCE_RE = re.compile(r"```json\s*(.*?)```", re.DOTALL)


def extract_fenced_json(completion: str):
    """Parse the first fenced ```json block; raises ValueError otherwise."""
    m = FENCE_RE.search(completion)
    if not m:
        raise ValueError("no fenced JSON block in completion")
    try:
        return json.loads(m.group(1))
    except json.JSONDecodeError as e:
        raise ValueError(f"fenced block is not valid JSON: {e}") from e


@dataclass
class MockRule:
    """Matches prompts by stage plus a case-insensitive substring or regex
    over the stage's request text."""

    response: str
    stage: str = "*"
    contains: str | None = None
    regex: str | None = None

    def matches(self, prompt: EngineeredPrompt) -> bool:
        if self.stage not in ("*", prompt.stage):
            return False
        if self.contains is not None \
                and self.contains.lower() not in prompt.user.lower():
            return False
        if self.regex is not None \
                and re.search(self.regex, prompt.user, re.IGNORECASE) is None:
            return False
        return True


class ChatBackend:
    """Interface: complete(prompt) -> completion text."""

    kind = "abstract"

    def complete(self, prompt: EngineeredPrompt) -> str:
        raise NotImplementedError


class MockBackend(ChatBackend):
    """Table-driven canned completions; first matching rule wins.

    The table must be total over whatever prompts a test or benchmark sends:
    an unmatched prompt is an error, never a silent default.
    """

    kind = "mock"

    def __init__(self, rules: list[MockRule], delay_s: float = 0.0):
        self.rules = list(rules)
        self.delay_s = delay_s
        self.calls: list[tuple[str, str]] = []

    def complete(self, prompt: EngineeredPrompt) -> str:
        if self.delay_s:
            import time
            time.sleep(self.delay_s)
        self.calls.append((prompt.stage, prompt.user))
        for rule in self.rules:
            if rule.matches(prompt):
                return rule.response
        raise BackendError(
            f"mock table has no rule for stage {prompt.stage} request "
            f"{prompt.user[:80]!r}")


def fenced(payload: dict) -> str:
    """Render a canned completion with the payload in a fenced block."""
    return "```json\n" + json.dumps(payload, indent=1) + "\n```"


@dataclass
class LiveBackend(ChatBackend):
    """OpenAI-style chat-completions endpoint (also served by local runners)."""

    endpoint: str
    model: str
    api_key: str | None = None
    temperature: float = 0.0
    timeout_s: float = 60.0
    kind: str = field(default="live", init=False)

    def complete(self, prompt: EngineeredPrompt) -> str:
        import httpx

        url = self.endpoint.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        system = prompt.system
        if prompt.history:
            system = system + "\n\n" + prompt.history
        body = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": prompt.user},
            ],
        }
        try:
            resp = httpx.post(url, json=body, headers=headers,
                              timeout=self.timeout_s)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except Exception as e:  # transport, HTTP status, or shape failure
            raise BackendError(f"chat backend failure: {e}") from e
