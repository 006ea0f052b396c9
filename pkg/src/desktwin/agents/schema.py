"""Typed stage outputs: level-1 requirements and level-2 task lists.

Both stages speak JSON. A requirement is {"intent": <kind>, "detail": text};
tasks are discriminated on "type" and carry the fields the workers execute.
Parsers here only check structure; semantic bounds live in validate_tasks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

REQUIREMENT_INTENTS = ("search", "add", "remove", "position", "move",
                       "arrange", "appearance_env")
TASK_TYPES = ("search", "add", "remove", "position", "move", "arrange",
              "appearance")

# requirement intent -> task types it may legally emit
INTENT_TASKS = {
    "search": {"search"},
    "add": {"add", "arrange"},
    "remove": {"remove", "search"},
    "position": {"position", "search"},
    "move": {"move", "search"},
    "arrange": {"arrange", "add", "search"},
    "appearance_env": {"appearance"},
}


class SchemaError(ValueError):
    """Stage output does not match its schema."""


@dataclass
class Requirement:
    intent: str
    detail: str

    def to_dict(self) -> dict:
        return {"intent": self.intent, "detail": self.detail}


def parse_requirements(doc: Any) -> list[Requirement]:
    if not isinstance(doc, dict) or "requirements" not in doc:
        raise SchemaError("expected an object with a 'requirements' array")
    items = doc["requirements"]
    if not isinstance(items, list) or not items:
        raise SchemaError("'requirements' must be a non-empty array")
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise SchemaError(f"requirement {i} is not an object")
        intent = item.get("intent")
        if intent not in REQUIREMENT_INTENTS:
            raise SchemaError(f"requirement {i} has unknown intent '{intent}'")
        detail = item.get("detail", "")
        if not isinstance(detail, str):
            raise SchemaError(f"requirement {i} detail must be a string")
        out.append(Requirement(intent=intent, detail=detail))
    return out


def _check_placement(task_idx: int, p: Any, name: str):
    if not isinstance(p, dict):
        raise SchemaError(f"task {task_idx}: {name} must be an object")
    if ("anchor" in p) == ("point" in p):
        raise SchemaError(f"task {task_idx}: {name} needs exactly one of "
                          f"'anchor' or 'point'")
    if "point" in p and (not isinstance(p["point"], list) or len(p["point"]) != 3):
        raise SchemaError(f"task {task_idx}: {name}.point must be [x, y, z]")
    if "offset" in p and (not isinstance(p["offset"], list) or len(p["offset"]) != 3):
        raise SchemaError(f"task {task_idx}: {name}.offset must be [x, y, z]")


def _check_selector(task_idx: int, sel: Any):
    if not isinstance(sel, dict):
        raise SchemaError(f"task {task_idx}: selector must be an object")
    allowed = {"ids", "class", "tag", "near_anchor", "radius"}
    unknown = set(sel) - allowed
    if unknown:
        raise SchemaError(f"task {task_idx}: unknown selector fields {sorted(unknown)}")
    if not sel:
        raise SchemaError(f"task {task_idx}: selector must not be empty")
    if "ids" in sel and not isinstance(sel["ids"], list):
        raise SchemaError(f"task {task_idx}: selector.ids must be a list")


def parse_tasks(doc: Any, intent: str | None = None) -> list[dict]:
    """Structural validation; returns the task dicts unchanged."""
    if not isinstance(doc, dict) or "tasks" not in doc:
        raise SchemaError("expected an object with a 'tasks' array")
    items = doc["tasks"]
    if not isinstance(items, list):
        raise SchemaError("'tasks' must be an array")
    for i, t in enumerate(items):
        if not isinstance(t, dict):
            raise SchemaError(f"task {i} is not an object")
        kind = t.get("type")
        if kind not in TASK_TYPES:
            raise SchemaError(f"task {i} has unknown type '{kind}'")
        if intent is not None and kind not in INTENT_TASKS[intent]:
            raise SchemaError(f"task {i} type '{kind}' not valid for intent "
                              f"'{intent}'")
        if kind == "search":
            _check_selector(i, t.get("query"))
        elif kind == "add":
            if not isinstance(t.get("class_name"), str):
                raise SchemaError(f"task {i}: add needs class_name")
            _check_placement(i, t.get("placement"), "placement")
        elif kind in ("remove", "position", "move", "arrange"):
            _check_selector(i, t.get("selector"))
            if kind == "position":
                _check_placement(i, t.get("target"), "target")
            if kind == "move":
                if ("delta" in t) == ("target" in t):
                    raise SchemaError(f"task {i}: move needs exactly one of "
                                      f"'delta' or 'target'")
                if "delta" in t and (not isinstance(t["delta"], list)
                                     or len(t["delta"]) != 3):
                    raise SchemaError(f"task {i}: move.delta must be [x, y, z]")
                if "target" in t:
                    _check_placement(i, t["target"], "target")
            if kind == "arrange":
                if t.get("pattern") not in ("line", "circle", "grid"):
                    raise SchemaError(f"task {i}: arrange.pattern must be "
                                      f"line, circle, or grid")
                if "origin" in t:
                    _check_placement(i, t["origin"], "origin")
        elif kind == "appearance":
            if not any(k in t for k in ("time_of_day", "weather", "intensity")):
                raise SchemaError(f"task {i}: appearance needs at least one of "
                                  f"time_of_day, weather, intensity")
    return items
