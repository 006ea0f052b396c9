"""Rule-based bounds on parsed task lists.

Checks run before any worker touches a scene and report every violation,
not just the first: unknown classes and anchors, counts outside [1, 100],
spacing outside (0, 1000] m, and positions outside the scene bounds
expanded by a factor of two.
"""
from __future__ import annotations

import numpy as np

from ..scene.catalog import AssetCatalog
from ..scene.environment import WEATHER_KINDS
from ..scene.graph import SceneGraph

COUNT_MAX = 100
SPACING_MAX = 1000.0
MIN_HALF_EXTENT = 10.0  # meters; floors the bounds of near-empty scenes


def scene_bounds_expanded(scene: SceneGraph, factor: float = 2.0
                          ) -> tuple[np.ndarray, np.ndarray]:
    points = [a.pose.translation for a in scene.assets]
    points.extend(scene.anchors.values())
    pts = np.stack(points) if points else np.zeros((1, 3))
    center = (pts.min(axis=0) + pts.max(axis=0)) / 2.0
    half = np.maximum((pts.max(axis=0) - pts.min(axis=0)) / 2.0, MIN_HALF_EXTENT)
    return center - factor * half, center + factor * half


def _point_of(placement: dict, scene: SceneGraph) -> np.ndarray | None:
    if "point" in placement:
        base = np.asarray(placement["point"], dtype=np.float64)
    else:
        name = placement.get("anchor")
        if name not in scene.anchors:
            return None
        base = scene.anchors[name]
    offset = np.asarray(placement.get("offset", [0, 0, 0]), dtype=np.float64)
    return base + offset


def validate_tasks(tasks: list[dict], scene: SceneGraph,
                   catalog: AssetCatalog | None = None) -> list[str]:
    """Returns all violations; an empty list means the tasks pass."""
    catalog = catalog or scene.catalog
    lo, hi = scene_bounds_expanded(scene)
    violations: list[str] = []

    def check_point(i: int, label: str, placement: dict | None):
        if placement is None:
            return
        if "anchor" in placement and placement["anchor"] not in scene.anchors:
            violations.append(f"task {i}: unknown anchor "
                              f"'{placement['anchor']}' in {label}")
            return
        p = _point_of(placement, scene)
        if p is not None and (np.any(p < lo) or np.any(p > hi)):
            violations.append(
                f"task {i}: {label} position {p.tolist()} outside scene "
                f"bounds [{lo.tolist()}, {hi.tolist()}]")

    def check_selector(i: int, sel: dict):
        if "class" in sel and sel["class"] not in catalog:
            violations.append(f"task {i}: unknown class '{sel['class']}' "
                              f"in selector")
        if "near_anchor" in sel and sel["near_anchor"] not in scene.anchors:
            violations.append(f"task {i}: unknown anchor "
                              f"'{sel['near_anchor']}' in selector")
        for asset_id in sel.get("ids", []):
            if not any(a.id == asset_id for a in scene.assets):
                violations.append(f"task {i}: unknown asset id '{asset_id}'")

    for i, t in enumerate(tasks):
        kind = t["type"]
        if kind == "add":
            if t["class_name"] not in catalog:
                near = catalog.suggest(t["class_name"])
                hint = f" (closest: {', '.join(near)})" if near else ""
                violations.append(f"task {i}: unknown class "
                                  f"'{t['class_name']}'{hint}")
            count = t.get("count", 1)
            if not isinstance(count, int) or not 1 <= count <= COUNT_MAX:
                violations.append(f"task {i}: count {count} outside "
                                  f"[1, {COUNT_MAX}]")
            spacing = t.get("spacing", 1.0)
            if not 0 < spacing <= SPACING_MAX:
                violations.append(f"task {i}: spacing {spacing} outside "
                                  f"(0, {SPACING_MAX}]")
            check_point(i, "placement", t.get("placement"))
        elif kind == "search":
            check_selector(i, t["query"])
        elif kind in ("remove", "position", "move", "arrange"):
            check_selector(i, t["selector"])
            if kind == "position":
                check_point(i, "target", t.get("target"))
            if kind == "move" and "target" in t:
                check_point(i, "target", t["target"])
            if kind == "move" and "delta" in t:
                d = np.asarray(t["delta"], dtype=np.float64)
                if np.linalg.norm(d) > np.linalg.norm(hi - lo):
                    violations.append(f"task {i}: move delta {d.tolist()} "
                                      f"larger than the scene bounds")
            if kind == "arrange":
                spacing = t.get("spacing", 0.0)
                if not 0 < spacing <= SPACING_MAX:
                    violations.append(f"task {i}: spacing {spacing} outside "
                                      f"(0, {SPACING_MAX}]")
                if "origin" in t:
                    check_point(i, "origin", t["origin"])
        elif kind == "appearance":
            if "weather" in t and t["weather"] not in WEATHER_KINDS:
                violations.append(f"task {i}: unknown weather '{t['weather']}'")
            if "time_of_day" in t and not 0 <= float(t["time_of_day"]) < 24:
                violations.append(f"task {i}: time_of_day {t['time_of_day']} "
                                  f"outside [0, 24)")
            if "intensity" in t and not 0 <= float(t["intensity"]) <= 1:
                violations.append(f"task {i}: intensity {t['intensity']} "
                                  f"outside [0, 1]")
    return violations
