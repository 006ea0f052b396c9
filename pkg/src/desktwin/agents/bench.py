"""Benchmark harness for the prompt pipeline.

Repeatability: the share of direct-prompt trials whose staged diff equals
the modal diff for that case. Generalizability: the share of all
(case, trial) runs whose accepted result satisfies the case's rule-based
checker, across all four prompt gradations. Time: mean wall clock from
prompt input to staged diff. Each trial runs on a fresh scene and session.
"""
from __future__ import annotations

import copy
import json
import statistics
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DeskTwinError, FormatError
from ..geometry import RigidTransform
from ..scene.catalog import AssetCatalog
from ..scene.graph import SceneGraph
from .backend import ChatBackend
from .pipeline import AgentTrace, run_pipeline
from .session import SessionContext, accept_pending

TASK_KINDS = ("search", "add", "remove", "position", "move", "arrange",
              "appearance")
GRADATIONS = ("direct", "indirect", "vague", "erroneous")


def make_bench_scene(catalog: AssetCatalog) -> SceneGraph:
    """Fixed starting scene: three cones, a car, and a barrier."""
    scene = SceneGraph(catalog)
    for x in (2.0, 4.0, 6.0):
        scene.add_asset("traffic_cone",
                        RigidTransform(np.eye(3), np.array([x, 0.0, 0.0])))
    scene.add_asset("passenger_car",
                    RigidTransform(np.eye(3), np.array([10.0, 5.0, 0.0])))
    scene.add_asset("road_barrier",
                    RigidTransform(np.eye(3), np.array([-3.0, 2.0, 0.0])))
    return scene


def default_suite() -> dict:
    """The 7 kinds x 4 gradations case set matching the default mock table."""
    prompts = {
        "search": {
            "direct": "Find all traffic_cone assets in the scene.",
            "indirect": "Which pylons are present?",
            "vague": "What markers do we have?",
            "erroneous": "Finde all trafic cones pls",
        },
        "add": {
            "direct": "Add 2 traffic_cone assets at the scene center with 1.5 m spacing.",
            "indirect": "Place a couple of cones in the middle.",
            "vague": "We need some cones.",
            "erroneous": "add too cones midle",
        },
        "remove": {
            "direct": "Remove the asset passenger_car_1.",
            "indirect": "Get rid of the car.",
            "vague": "Too many vehicles, clean up.",
            "erroneous": "remove the carr",
        },
        "position": {
            "direct": "Position the passenger_car at anchor jtekt_entrance.",
            "indirect": "Park the car at the JTEKT entrance.",
            "vague": "Put the car by the entrance.",
            "erroneous": "car to jtekt entrnce plz",
        },
        "move": {
            "direct": "Move the road_barrier by [2, 0, 0] meters.",
            "indirect": "Shift the barrier a couple meters along x.",
            "vague": "Scoot the barrier over.",
            "erroneous": "move barier 2m",
        },
        "arrange": {
            "direct": "Arrange the traffic cones in a line with 2 m spacing.",
            "indirect": "Line up the cones two meters apart.",
            "vague": "Make the cones tidy.",
            "erroneous": "cones in lin 2m",
        },
        "appearance": {
            "direct": "Set the weather to rain with intensity 0.7.",
            "indirect": "Make it drizzle outside.",
            "vague": "Weather could be wetter.",
            "erroneous": "mak it ran",
        },
    }
    checkers = {
        "search": {"kind": "search_count", "class": "traffic_cone", "expect": 3},
        "add": {"kind": "class_count_delta", "class": "traffic_cone", "delta": 2},
        "remove": {"kind": "class_count", "class": "passenger_car", "expect": 0},
        "position": {"kind": "near_anchor", "class": "passenger_car",
                     "anchor": "jtekt_entrance", "radius": 0.5, "at_least": 1},
        "move": {"kind": "moved", "class": "road_barrier", "min_distance": 1.0},
        "arrange": {"kind": "collinear", "class": "traffic_cone",
                    "at_least": 3, "spacing": 2.0},
        "appearance": {"kind": "environment", "weather": "rain"},
    }
    cases = [
        {"task_kind": kind, "gradation": grad, "prompt": prompts[kind][grad],
         "checker": checkers[kind]}
        for kind in TASK_KINDS for grad in GRADATIONS
    ]
    return {"cases": cases}


def load_suite(path) -> dict:
    doc = json.loads(Path(path).read_text())
    cases = doc.get("cases")
    if not isinstance(cases, list) or not cases:
        raise FormatError("suite must hold a non-empty 'cases' array")
    for i, c in enumerate(cases):
        for key in ("task_kind", "gradation", "prompt", "checker"):
            if key not in c:
                raise FormatError(f"case {i} is missing '{key}'")
        if c["task_kind"] not in TASK_KINDS:
            raise FormatError(f"case {i}: unknown task_kind '{c['task_kind']}'")
        if c["gradation"] not in GRADATIONS:
            raise FormatError(f"case {i}: unknown gradation '{c['gradation']}'")
    return doc


def _class_positions(scene: SceneGraph, class_name: str) -> dict[str, np.ndarray]:
    return {a.id: a.pose.translation.copy() for a in scene.assets
            if a.class_name == class_name}


def check_satisfaction(checker: dict, before: SceneGraph, after: SceneGraph,
                       trace: AgentTrace) -> bool:
    kind = checker["kind"]
    if kind == "search_count":
        for outcome in trace.worker_outcomes:
            if outcome["type"] == "search":
                ids = outcome["result"]
                members = [a.id for a in before.assets
                           if a.class_name == checker["class"]]
                return len(ids) == checker["expect"] and set(members) <= set(ids)
        return False
    if kind == "class_count":
        count = sum(1 for a in after.assets
                    if a.class_name == checker["class"])
        return count == checker["expect"]
    if kind == "class_count_delta":
        n_before = sum(1 for a in before.assets
                       if a.class_name == checker["class"])
        n_after = sum(1 for a in after.assets
                      if a.class_name == checker["class"])
        return n_after - n_before == checker["delta"]
    if kind == "near_anchor":
        anchor = after.anchor(checker["anchor"])
        hits = sum(
            1 for a in after.assets
            if a.class_name == checker["class"]
            and np.linalg.norm(a.pose.translation - anchor) <= checker["radius"])
        return hits >= checker.get("at_least", 1)
    if kind == "moved":
        old = _class_positions(before, checker["class"])
        new = _class_positions(after, checker["class"])
        shared = set(old) & set(new)
        return bool(shared) and all(
            np.linalg.norm(new[i] - old[i]) >= checker["min_distance"]
            for i in shared)
    if kind == "collinear":
        pos = np.stack([a.pose.translation for a in after.assets
                        if a.class_name == checker["class"]])
        if len(pos) < checker.get("at_least", 2):
            return False
        centered = pos - pos.mean(axis=0)
        _, s, _ = np.linalg.svd(centered)
        if len(s) > 1 and s[1] > 1e-6:
            return False
        if "spacing" in checker:
            d = np.sort(np.linalg.norm(np.diff(pos[np.argsort(pos[:, 0])],
                                               axis=0), axis=1))
            if not np.allclose(d, checker["spacing"], atol=1e-6):
                return False
        return True
    if kind == "environment":
        env = after.environment
        for key in ("weather",):
            if key in checker and getattr(env, key) != checker[key]:
                return False
        if "intensity" in checker and env.intensity != checker["intensity"]:
            return False
        return True
    raise FormatError(f"unknown checker kind '{checker['kind']}'")


@dataclass
class BenchReport:
    repeatability_pct: float
    generalizability_pct: float
    mean_time_s: float
    trials: int
    matrix: dict[str, dict[str, float]]  # kind -> gradation -> satisfaction %
    failures: list[str] = field(default_factory=list)

    def table_row(self, label: str) -> str:
        return (f"{label}: {self.generalizability_pct:.2f} / "
                f"{self.repeatability_pct:.2f} / {self.mean_time_s:.2f}")

    def to_dict(self) -> dict:
        return {
            "repeatability_pct": self.repeatability_pct,
            "generalizability_pct": self.generalizability_pct,
            "mean_time_s": self.mean_time_s,
            "trials": self.trials,
            "matrix": self.matrix,
            "failures": self.failures,
        }

    def to_csv(self) -> str:
        lines = ["task_kind," + ",".join(GRADATIONS)]
        for kind in TASK_KINDS:
            if kind not in self.matrix:
                continue
            row = self.matrix[kind]
            lines.append(kind + "," + ",".join(
                f"{row.get(g, float('nan')):.2f}" for g in GRADATIONS))
        return "\n".join(lines) + "\n"


def benchmark(suite: dict, backend: ChatBackend, trials: int,
              scene_factory) -> BenchReport:
    """Run every case `trials` times on fresh scenes and score the results."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cases = suite["cases"]
    times: list[float] = []
    failures: list[str] = []
    satisfaction: dict[tuple[str, str], list[bool]] = {}
    direct_diffs: dict[str, list[str]] = {}

    for case in cases:
        key = (case["task_kind"], case["gradation"])
        satisfaction.setdefault(key, [])
        for trial in range(trials):
            scene = scene_factory()
            before = copy.deepcopy(scene)
            ctx = SessionContext(scene=scene)
            try:
                diff, trace = run_pipeline(case["prompt"], ctx, backend)
                times.append(trace.total_seconds)
                accept_pending(ctx)
                ok = check_satisfaction(case["checker"], before, scene, trace)
                canon = diff.canonical()
            except DeskTwinError as e:
                ok = False
                canon = f"<error: {e}>"
                failures.append(f"{key} trial {trial}: {e}")
            satisfaction[key].append(ok)
            if case["gradation"] == "direct":
                direct_diffs.setdefault(case["task_kind"], []).append(canon)

    modal_hits = 0
    direct_total = 0
    for canon_list in direct_diffs.values():
        mode, count = Counter(canon_list).most_common(1)[0]
        modal_hits += sum(1 for c in canon_list
                          if c == mode and not c.startswith("<error"))
        direct_total += len(canon_list)

    all_flags = [f for flags in satisfaction.values() for f in flags]
    matrix = {}
    for (kind, grad), flags in satisfaction.items():
        matrix.setdefault(kind, {})[grad] = 100.0 * sum(flags) / len(flags)

    return BenchReport(
        repeatability_pct=100.0 * modal_hits / direct_total if direct_total else 0.0,
        generalizability_pct=100.0 * sum(all_flags) / len(all_flags)
        if all_flags else 0.0,
        mean_time_s=statistics.mean(times) if times else 0.0,
        trials=trials,
        matrix=matrix,
        failures=failures,
    )
