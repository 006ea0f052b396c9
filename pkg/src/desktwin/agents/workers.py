"""Rule-based workers: execute validated tasks against a scratch scene.

Workers only speak scene-graph operations, so every effect they can have is
an invertible SceneDiff. Multi-count adds line up along +x at the task
spacing; appearance tasks merge partial updates into the current
environment, defaulting intensity to 0.5 when enabling non-clear weather.
"""
from __future__ import annotations

import numpy as np

from ..geometry import RigidTransform
from ..errors import SceneError
from ..scene.environment import EnvironmentState
from ..scene.graph import SceneDiff, SceneGraph

DEFAULT_WEATHER_INTENSITY = 0.5


def resolve_point(scene: SceneGraph, placement: dict) -> np.ndarray:
    base = (scene.anchor(placement["anchor"]) if "anchor" in placement
            else np.asarray(placement["point"], dtype=np.float64))
    return base + np.asarray(placement.get("offset", [0, 0, 0]), dtype=np.float64)


def resolve_selector(scene: SceneGraph, sel: dict) -> list[str]:
    if "ids" in sel:
        for asset_id in sel["ids"]:
            scene.asset(asset_id)
        return list(sel["ids"])
    query = {k: sel[k] for k in ("class", "tag", "near_anchor", "radius")
             if k in sel}
    return scene.search(query)


def execute_tasks(scene: SceneGraph, tasks: list[dict],
                  provenance: str) -> tuple[SceneDiff, list[dict]]:
    """Run tasks in order; returns (composite diff, per-task outcomes)."""
    composite = SceneDiff(edits=[], provenance=provenance)
    outcomes: list[dict] = []
    for t in tasks:
        kind = t["type"]
        if kind == "search":
            ids = resolve_selector(scene, {k: v for k, v in t["query"].items()})
            outcomes.append({"type": kind, "result": ids})
            continue
        if kind == "add":
            base = resolve_point(scene, t["placement"])
            count = int(t.get("count", 1))
            spacing = float(t.get("spacing", 1.0))
            new_ids = []
            for i in range(count):
                pos = base + np.array([i * spacing, 0.0, 0.0])
                overrides = {"properties": dict(t.get("properties", {}))}
                if "uniform_scale" in t:
                    overrides["uniform_scale"] = float(t["uniform_scale"])
                new_id, diff = scene.add_asset(
                    t["class_name"], RigidTransform(np.eye(3), pos),
                    overrides=overrides, created_by="agent",
                    provenance=provenance)
                composite = composite.merged(diff)
                new_ids.append(new_id)
            outcomes.append({"type": kind, "result": new_ids})
        elif kind == "remove":
            ids = resolve_selector(scene, t["selector"])
            for asset_id in ids:
                composite = composite.merged(
                    scene.remove_asset(asset_id, provenance=provenance))
            outcomes.append({"type": kind, "result": ids})
        elif kind == "position":
            ids = resolve_selector(scene, t["selector"])
            target = resolve_point(scene, t["target"])
            for asset_id in ids:
                rot = scene.asset(asset_id).pose.rotation.copy()
                composite = composite.merged(scene.set_pose(
                    asset_id, RigidTransform(rot, target),
                    provenance=provenance))
            outcomes.append({"type": kind, "result": ids})
        elif kind == "move":
            ids = resolve_selector(scene, t["selector"])
            for asset_id in ids:
                pose = scene.asset(asset_id).pose
                if "delta" in t:
                    new_t = pose.translation + np.asarray(t["delta"], dtype=float)
                else:
                    new_t = resolve_point(scene, t["target"])
                composite = composite.merged(scene.set_pose(
                    asset_id, RigidTransform(pose.rotation.copy(), new_t),
                    provenance=provenance))
            outcomes.append({"type": kind, "result": ids})
        elif kind == "arrange":
            ids = resolve_selector(scene, t["selector"])
            if not ids:
                raise SceneError("arrange selector matched no assets")
            origin = (resolve_point(scene, t["origin"]) if "origin" in t
                      else scene.anchor("scene_center").copy())
            composite = composite.merged(scene.arrange(
                ids, t["pattern"], float(t["spacing"]), origin,
                provenance=provenance))
            outcomes.append({"type": kind, "result": ids})
        elif kind == "appearance":
            env = scene.environment
            weather = t.get("weather", env.weather)
            intensity = t.get("intensity")
            if intensity is None:
                keep = env.intensity if weather == env.weather else 0.0
                intensity = keep
                if weather != "clear" and intensity == 0.0:
                    intensity = DEFAULT_WEATHER_INTENSITY
            new_env = EnvironmentState(
                time_of_day=float(t.get("time_of_day", env.time_of_day)),
                weather=weather,
                intensity=float(intensity),
            )
            composite = composite.merged(
                scene.set_environment(new_env, provenance=provenance))
            outcomes.append({"type": kind,
                             "result": new_env.to_dict()})
        else:
            raise SceneError(f"unknown task type '{kind}'")
    return composite, outcomes
