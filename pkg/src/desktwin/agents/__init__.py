from .backend import ChatBackend, LiveBackend, MockBackend, MockRule
from .mock_rules import make_default_mock
from .pipeline import AgentTrace, run_pipeline
from .prompts import EngineeredPrompt, engineer_prompt
from .schema import REQUIREMENT_INTENTS, Requirement
from .session import SessionContext, accept_pending, reject_pending, undo_last
from .validate import validate_tasks
from .bench import BenchReport, benchmark, default_suite, make_bench_scene

__all__ = [
    "ChatBackend",
    "LiveBackend",
    "MockBackend",
    "MockRule",
    "make_default_mock",
    "AgentTrace",
    "run_pipeline",
    "EngineeredPrompt",
    "engineer_prompt",
    "REQUIREMENT_INTENTS",
    "Requirement",
    "SessionContext",
    "accept_pending",
    "reject_pending",
    "undo_last",
    "validate_tasks",
    "BenchReport",
    "benchmark",
    "default_suite",
    "make_bench_scene",
]
