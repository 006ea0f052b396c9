"""Session state: conversation history, the single pending diff, and undo.

The scene is never touched between run_pipeline and accept_pending; accept
applies the staged diff atomically through the scene's edit lock and pushes
it on the undo stack.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import SceneError
from ..scene.graph import SceneDiff, SceneGraph

_session_counter = itertools.count(1)


@dataclass
class SessionContext:
    scene: SceneGraph
    session_id: str = ""
    history: list[dict] = field(default_factory=list)
    pending: SceneDiff | None = None
    pending_prompt: str | None = None
    undo_stack: list[SceneDiff] = field(default_factory=list)

    def __post_init__(self):
        if not self.session_id:
            self.session_id = f"session_{next(_session_counter)}"

    def record(self, prompt: str, status: str, summary: str):
        self.history.append({"prompt": prompt, "status": status,
                             "summary": summary})


def stage_pending(ctx: SessionContext, prompt: str, diff: SceneDiff):
    if ctx.pending is not None:
        raise SceneError("a pending diff already exists; accept or reject it")
    ctx.pending = diff
    ctx.pending_prompt = prompt


def accept_pending(ctx: SessionContext) -> SceneDiff:
    """Apply the staged diff atomically; returns it after pushing to undo."""
    if ctx.pending is None:
        raise SceneError("no pending diff to accept")
    diff = ctx.pending
    ctx.scene.apply_diff(diff)
    ctx.undo_stack.append(diff)
    ctx.record(ctx.pending_prompt or "(direct)", "accepted", diff.summary())
    ctx.pending = None
    ctx.pending_prompt = None
    return diff


def reject_pending(ctx: SessionContext):
    if ctx.pending is None:
        raise SceneError("no pending diff to reject")
    ctx.record(ctx.pending_prompt or "(direct)", "rejected",
               ctx.pending.summary())
    ctx.pending = None
    ctx.pending_prompt = None


def undo_last(ctx: SessionContext) -> SceneDiff:
    if not ctx.undo_stack:
        raise SceneError("undo stack is empty")
    diff = ctx.undo_stack.pop()
    ctx.scene.revert_diff(diff)
    ctx.record("(undo)", "undone", diff.summary())
    return diff
