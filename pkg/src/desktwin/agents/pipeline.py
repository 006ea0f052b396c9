"""The prompt-to-diff pipeline.

Stage order: engineer the level-1 prompt, get requirements from the level-1
completion, expand each requirement into tasks through a level-2 completion,
validate every task against the catalog and anchors, then let the workers
execute on a deep copy of the scene. The resulting composite diff is staged
on the session as pending; the live scene is untouched until accept.

Unparseable completions retry up to three times with a corrective
instruction appended; the trace records every stage with wall-clock timing,
on failure as well as success.
"""
from __future__ import annotations

import copy
import json
import time
from dataclasses import dataclass, field

from ..errors import BackendError, PipelineError
from ..scene.graph import SceneDiff
from .backend import ChatBackend, extract_fenced_json
from .prompts import EngineeredPrompt, engineer_prompt
from .schema import SchemaError, parse_requirements, parse_tasks
from .session import SessionContext, stage_pending
from .validate import validate_tasks
from .workers import execute_tasks

MAX_PARSE_RETRIES = 3
CORRECTIVE_NOTE = ("\n\nYour previous reply could not be parsed ({error}). "
                   "Reply again with exactly one fenced ```json block "
                   "matching the schema.")


@dataclass
class StageRecord:
    name: str
    status: str = "pending"      # ok | error | skipped
    seconds: float = 0.0
    detail: str = ""


@dataclass
class AgentTrace:
    raw_prompt: str
    engineered_level1: str = ""
    level1_response: str = ""
    requirements: list[dict] = field(default_factory=list)
    level2: list[dict] = field(default_factory=list)  # per requirement
    tasks: list[dict] = field(default_factory=list)
    worker_outcomes: list[dict] = field(default_factory=list)
    stages: list[StageRecord] = field(default_factory=list)
    total_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "raw_prompt": self.raw_prompt,
            "engineered_level1": self.engineered_level1,
            "level1_response": self.level1_response,
            "requirements": self.requirements,
            "level2": self.level2,
            "tasks": self.tasks,
            "worker_outcomes": self.worker_outcomes,
            "stages": [{"name": s.name, "status": s.status,
                        "seconds": s.seconds, "detail": s.detail}
                       for s in self.stages],
            "total_seconds": self.total_seconds,
        }


def _complete_with_retries(backend: ChatBackend, prompt: EngineeredPrompt,
                           parser, stage_name: str):
    """Returns (parsed, last_completion); raises on exhaustion."""
    last_error = None
    ep = prompt
    completion = ""
    for _ in range(MAX_PARSE_RETRIES):
        try:
            completion = backend.complete(ep)
        except BackendError as e:
            e.stage = stage_name
            raise
        try:
            doc = extract_fenced_json(completion)
            return parser(doc), completion
        except (ValueError, SchemaError) as e:
            last_error = e
            ep = EngineeredPrompt(
                stage=ep.stage, system=ep.system, history=ep.history,
                user=ep.user + CORRECTIVE_NOTE.format(error=e))
    raise PipelineError(
        f"{stage_name}: completion unparseable after "
        f"{MAX_PARSE_RETRIES} attempts: {last_error}")


def run_pipeline(raw: str, ctx: SessionContext, backend: ChatBackend,
                 depth: int = 2) -> tuple[SceneDiff, AgentTrace]:
    """Turn a natural-language prompt into a staged (pending) SceneDiff.

    depth=2 is the full manager hierarchy; depth=1 bypasses the requirement
    split and asks one completion for the task list directly.
    """
    if depth not in (1, 2):
        raise ValueError("pipeline depth must be 1 or 2")
    if depth == 1:
        return _run_single_level(raw, ctx, backend)
    t_start = time.perf_counter()
    trace = AgentTrace(raw_prompt=raw)
    level1_stage = StageRecord(name="level1")
    workers_stage = StageRecord(name="workers", status="skipped")
    trace.stages = [level1_stage, workers_stage]

    def fail(exc: Exception, stage: StageRecord, message: str):
        stage.status = "error"
        stage.detail = message
        trace.total_seconds = time.perf_counter() - t_start
        if isinstance(exc, PipelineError):
            exc.trace = trace
            return exc
        return PipelineError(message, trace=trace)

    # level 1: requirements
    t0 = time.perf_counter()
    try:
        ep1 = engineer_prompt(raw, ctx, "level1")
        trace.engineered_level1 = ep1.text
        requirements, completion = _complete_with_retries(
            backend, ep1, parse_requirements, "level1")
        trace.level1_response = completion
        trace.requirements = [r.to_dict() for r in requirements]
    except (PipelineError, BackendError, ValueError) as e:
        level1_stage.seconds = time.perf_counter() - t0
        raise fail(e, level1_stage, f"level1 failed: {e}") from e
    level1_stage.seconds = time.perf_counter() - t0
    level1_stage.status = "ok"

    # level 2: one completion per requirement; records exist up front so the
    # trace always holds 2 + len(requirements) stages, even on failure
    level2_stages = [StageRecord(name=f"level2[{i}]", status="skipped")
                     for i in range(len(requirements))]
    trace.stages = [level1_stage] + level2_stages + [workers_stage]
    all_tasks: list[dict] = []
    for i, req in enumerate(requirements):
        stage = level2_stages[i]
        t0 = time.perf_counter()
        try:
            payload = json.dumps(req.to_dict(), sort_keys=True)
            ep2 = engineer_prompt(payload, ctx, "level2")
            tasks, completion = _complete_with_retries(
                backend, ep2,
                lambda doc, intent=req.intent: parse_tasks(doc, intent),
                f"level2[{i}]")
        except (PipelineError, BackendError) as e:
            stage.seconds = time.perf_counter() - t0
            raise fail(e, stage, f"level2[{i}] ({req.intent}) failed: {e}") from e
        stage.seconds = time.perf_counter() - t0
        stage.status = "ok"
        trace.level2.append({"requirement": req.to_dict(),
                             "response": completion, "tasks": tasks})
        all_tasks.extend(tasks)

    # rule bounds, then workers on a scratch copy
    t0 = time.perf_counter()
    violations = validate_tasks(all_tasks, ctx.scene)
    if violations:
        workers_stage.seconds = time.perf_counter() - t0
        e = PipelineError("task validation failed: " + "; ".join(violations))
        raise fail(e, workers_stage, str(e))
    trace.tasks = all_tasks
    scratch = copy.deepcopy(ctx.scene)
    try:
        diff, outcomes = execute_tasks(scratch, all_tasks,
                                       provenance=f"prompt:{raw[:60]}")
    except Exception as e:
        workers_stage.seconds = time.perf_counter() - t0
        raise fail(e, workers_stage, f"worker dispatch failed: {e}") from e
    workers_stage.seconds = time.perf_counter() - t0
    workers_stage.status = "ok"
    trace.worker_outcomes = outcomes
    trace.total_seconds = time.perf_counter() - t_start

    stage_pending(ctx, raw, diff)
    return diff, trace


def _run_single_level(raw: str, ctx: SessionContext, backend: ChatBackend
                      ) -> tuple[SceneDiff, AgentTrace]:
    """Depth-1 hierarchy: one completion emits the task list directly."""
    t_start = time.perf_counter()
    trace = AgentTrace(raw_prompt=raw)
    direct_stage = StageRecord(name="direct")
    workers_stage = StageRecord(name="workers", status="skipped")
    trace.stages = [direct_stage, workers_stage]

    t0 = time.perf_counter()
    try:
        ep = engineer_prompt(raw, ctx, "level2")
        trace.engineered_level1 = ep.text
        tasks, completion = _complete_with_retries(
            backend, ep, lambda doc: parse_tasks(doc, None), "direct")
        trace.level1_response = completion
    except (PipelineError, BackendError, ValueError) as e:
        direct_stage.status = "error"
        direct_stage.detail = str(e)
        direct_stage.seconds = time.perf_counter() - t0
        trace.total_seconds = time.perf_counter() - t_start
        if isinstance(e, PipelineError):
            e.trace = trace
            raise
        raise PipelineError(f"direct stage failed: {e}", trace=trace) from e
    direct_stage.seconds = time.perf_counter() - t0
    direct_stage.status = "ok"

    t0 = time.perf_counter()
    violations = validate_tasks(tasks, ctx.scene)
    if violations:
        workers_stage.status = "error"
        workers_stage.detail = "; ".join(violations)
        trace.total_seconds = time.perf_counter() - t_start
        raise PipelineError("task validation failed: " + "; ".join(violations),
                            trace=trace)
    trace.tasks = tasks
    scratch = copy.deepcopy(ctx.scene)
    diff, outcomes = execute_tasks(scratch, tasks, provenance=f"prompt:{raw[:60]}")
    workers_stage.seconds = time.perf_counter() - t0
    workers_stage.status = "ok"
    trace.worker_outcomes = outcomes
    trace.total_seconds = time.perf_counter() - t_start
    stage_pending(ctx, raw, diff)
    return diff, trace
