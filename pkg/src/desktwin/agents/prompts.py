"""Prompt engineering: deterministic assembly of stage prompts.

The engineered prompt wraps the raw user text with the catalog, the anchor
names, a scene summary, the last ten conversation exchanges, and the JSON
response schema the stage must emit. Identical inputs produce byte-identical
prompts.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .schema import REQUIREMENT_INTENTS

if TYPE_CHECKING:
    from .session import SessionContext

HISTORY_LIMIT = 10

LEVEL1_SCHEMA = """Respond with exactly one fenced JSON block of the form:
```json
{"requirements": [{"intent": "<one of: %s>", "detail": "<short instruction>"}]}
```""" % ", ".join(REQUIREMENT_INTENTS)

LEVEL2_SCHEMA = """Respond with exactly one fenced JSON block of the form:
```json
{"tasks": [ ... ]}
```
Task objects:
- {"type": "search", "query": {"class"?, "tag"?, "near_anchor"?, "radius"?}}
- {"type": "add", "class_name", "count"?, "placement": {"anchor"|"point", "offset"?}, "spacing"?, "properties"?, "uniform_scale"?}
- {"type": "remove", "selector": {"ids"? | "class"?, "tag"?, "near_anchor"?, "radius"?}}
- {"type": "position", "selector", "target": {"anchor"|"point", "offset"?}}
- {"type": "move", "selector", "delta": [x,y,z] | "target": {...}}
- {"type": "arrange", "selector", "pattern": "line"|"circle"|"grid", "spacing", "origin"?: {...}}
- {"type": "appearance", "time_of_day"?, "weather"?: "clear"|"fog"|"rain"|"snow", "intensity"?}"""


@dataclass(frozen=True)
class EngineeredPrompt:
    stage: str          # "level1" | "level2"
    system: str
    history: str
    user: str

    @property
    def text(self) -> str:
        parts = [self.system]
        if self.history:
            parts.append(self.history)
        parts.append(f"Request:\n{self.user}")
        return "\n\n".join(parts)


def scene_summary(scene) -> str:
    counts = Counter(a.class_name for a in scene.assets)
    if counts:
        inventory = ", ".join(f"{n}x {c}" for c, n in sorted(counts.items()))
    else:
        inventory = "no assets yet"
    env = scene.environment
    return (f"Scene: {inventory}. Environment: {env.weather}"
            f" (intensity {env.intensity:.2f}), time {env.time_of_day:.1f}h.")


def catalog_summary(scene) -> str:
    lines = []
    for name in scene.catalog.class_names:
        entry = scene.catalog.entries[name]
        tags = ", ".join(entry.tags)
        lines.append(f"- {name} ({entry.kind}; tags: {tags})")
    return "Available asset classes:\n" + "\n".join(lines)


def anchor_summary(scene) -> str:
    return "Anchors: " + ", ".join(sorted(scene.anchors))


def history_block(ctx: "SessionContext") -> str:
    recent = ctx.history[-HISTORY_LIMIT:]
    if not recent:
        return ""
    lines = [f"{i + 1}. \"{ex['prompt']}\" -> {ex['status']}: {ex['summary']}"
             for i, ex in enumerate(recent)]
    return "Previous exchanges:\n" + "\n".join(lines)


def engineer_prompt(raw: str, ctx: "SessionContext", stage: str) -> EngineeredPrompt:
    raw = raw.strip()
    if not raw:
        raise ValueError("prompt is empty")
    if stage not in ("level1", "level2"):
        raise ValueError(f"unknown stage '{stage}'")
    scene = ctx.scene
    role = ("You split a scenario-editing request into requirements."
            if stage == "level1" else
            "You turn one requirement into concrete scene tasks.")
    schema = LEVEL1_SCHEMA if stage == "level1" else LEVEL2_SCHEMA
    system = "\n\n".join([
        role,
        catalog_summary(scene),
        anchor_summary(scene),
        scene_summary(scene),
        schema,
    ])
    return EngineeredPrompt(stage=stage, system=system,
                            history=history_block(ctx), user=raw)
