"""Hybrid scene state and invertible edits.

Every mutation goes through one lock (single writer), bumps the revision
counter, and returns a SceneDiff that stores the prior state needed for an
exact revert. Anchors always include "scene_center", the centroid of the
asset bounding box, recomputed after every edit.
"""
from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import SceneError
from ..geometry import RigidTransform
from .catalog import AssetCatalog, load_catalog
from .environment import EnvironmentState

ARRANGE_PATTERNS = ("line", "circle", "grid")
_ABSENT = "__absent__"


@dataclass
class SceneAsset:
    id: str
    class_name: str
    kind: str                  # "splat" | "mesh"
    path: str                  # representation source, catalog-relative
    pose: RigidTransform
    uniform_scale: float = 1.0
    properties: dict[str, Any] = field(default_factory=dict)
    created_by: str = "user"

    def __post_init__(self):
        if self.uniform_scale <= 0:
            raise ValueError("uniform_scale must be positive")
        if self.created_by not in ("user", "agent"):
            raise ValueError("created_by must be 'user' or 'agent'")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "class_name": self.class_name,
            "representation": {"kind": self.kind, "path": self.path},
            "pose": self.pose.to_dict(),
            "uniform_scale": self.uniform_scale,
            "properties": dict(sorted(self.properties.items())),
            "created_by": self.created_by,
        }

    @staticmethod
    def from_dict(d: dict) -> "SceneAsset":
        return SceneAsset(
            id=d["id"],
            class_name=d["class_name"],
            kind=d["representation"]["kind"],
            path=d["representation"]["path"],
            pose=RigidTransform.from_dict(d["pose"]),
            uniform_scale=float(d.get("uniform_scale", 1.0)),
            properties=dict(d.get("properties", {})),
            created_by=d.get("created_by", "user"),
        )


@dataclass
class SceneDiff:
    """Ordered primitive edits, each carrying the prior state for reversal."""

    edits: list[dict] = field(default_factory=list)
    provenance: str = "direct"

    def to_dict(self) -> dict:
        return {"provenance": self.provenance, "edits": self.edits}

    @staticmethod
    def from_dict(d: dict) -> "SceneDiff":
        return SceneDiff(edits=list(d["edits"]), provenance=d.get("provenance", "direct"))

    def merged(self, other: "SceneDiff") -> "SceneDiff":
        return SceneDiff(edits=self.edits + other.edits, provenance=self.provenance)

    def canonical(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def summary(self) -> str:
        parts = []
        for e in self.edits:
            k = e["kind"]
            if k == "add":
                parts.append(f"add {e['asset']['id']}")
            elif k == "remove":
                parts.append(f"remove {e['asset']['id']}")
            elif k == "set_pose":
                parts.append(f"move {e['id']}")
            elif k == "set_property":
                parts.append(f"set {e['id']}.{e['key']}")
            else:
                parts.append(f"environment -> {e['new']['weather']}"
                             f" @ {e['new']['time_of_day']:.1f}h")
        return "; ".join(parts) if parts else "(no edits)"


class SceneGraph:
    def __init__(self, catalog: AssetCatalog,
                 environment: EnvironmentState | None = None,
                 anchors: dict[str, Any] | None = None,
                 catalog_ref: str | None = None):
        self.catalog = catalog
        self.environment = environment or EnvironmentState()
        self._assets: dict[str, SceneAsset] = {}
        self.anchors: dict[str, np.ndarray] = {
            name: np.asarray(pos, dtype=np.float64).reshape(3)
            for name, pos in {**catalog.anchors, **(anchors or {})}.items()
        }
        self.catalog_ref = catalog_ref
        self.revision = 0
        self._counters: dict[str, int] = {}
        self._lock = threading.RLock()
        self._recompute_center()

    def __deepcopy__(self, memo) -> "SceneGraph":
        import copy as _copy

        clone = SceneGraph.__new__(SceneGraph)
        clone.catalog = self.catalog  # immutable, shared
        clone.environment = EnvironmentState.from_dict(self.environment.to_dict())
        clone._assets = {k: SceneAsset.from_dict(a.to_dict())
                         for k, a in self._assets.items()}
        clone.anchors = {k: v.copy() for k, v in self.anchors.items()}
        clone.catalog_ref = self.catalog_ref
        clone.revision = self.revision
        clone._counters = _copy.deepcopy(self._counters)
        clone._lock = threading.RLock()
        return clone

    # ---- read side ----

    @property
    def assets(self) -> list[SceneAsset]:
        return list(self._assets.values())

    def asset(self, asset_id: str) -> SceneAsset:
        a = self._assets.get(asset_id)
        if a is None:
            raise SceneError(f"unknown asset id '{asset_id}'")
        return a

    def __len__(self) -> int:
        return len(self._assets)

    def anchor(self, name: str) -> np.ndarray:
        if name not in self.anchors:
            raise SceneError(f"unknown anchor '{name}'")
        return self.anchors[name]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self._assets:
            z = np.zeros(3)
            return z, z
        t = np.stack([a.pose.translation for a in self._assets.values()])
        return t.min(axis=0), t.max(axis=0)

    def search(self, query: dict) -> list[str]:
        """Conjunctive filter over class, tag, and anchor distance."""
        unknown = set(query) - {"class", "tag", "near_anchor", "radius"}
        if unknown:
            raise SceneError(f"unknown query fields {sorted(unknown)}")
        ids = []
        center = None
        if "near_anchor" in query:
            center = self.anchor(query["near_anchor"])
        radius = float(query.get("radius", 0.0))
        tag = query.get("tag")
        tag_classes = set(self.catalog.find_by_tag(tag)) if tag is not None else None
        for a in self._assets.values():
            if "class" in query and a.class_name != query["class"]:
                continue
            if tag_classes is not None:
                in_props = any(isinstance(v, str) and tag.lower() in v.lower()
                               for v in a.properties.values())
                if a.class_name not in tag_classes and not in_props:
                    continue
            if center is not None:
                if np.linalg.norm(a.pose.translation - center) > radius + 1e-12:
                    continue
            ids.append(a.id)
        return sorted(ids)

    # ---- serialization and equality ----

    def snapshot(self) -> dict:
        return {
            "assets": [a.to_dict() for a in self._assets.values()],
            "environment": self.environment.to_dict(),
            "anchors": {k: list(map(float, v)) for k, v in sorted(self.anchors.items())},
            "catalog_ref": self.catalog_ref,
        }

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True)

    # ---- edit machinery ----

    def _next_id(self, class_name: str) -> str:
        n = self._counters.get(class_name, 0) + 1
        self._counters[class_name] = n
        return f"{class_name}_{n}"

    def _note_id(self, asset_id: str, class_name: str):
        prefix = class_name + "_"
        if asset_id.startswith(prefix):
            try:
                n = int(asset_id[len(prefix):])
            except ValueError:
                return
            self._counters[class_name] = max(self._counters.get(class_name, 0), n)

    def _recompute_center(self):
        lo, hi = self.bounds()
        self.anchors["scene_center"] = (lo + hi) / 2.0

    def _apply_edit(self, edit: dict):
        kind = edit["kind"]
        if kind == "add":
            asset = SceneAsset.from_dict(edit["asset"])
            if asset.id in self._assets:
                raise SceneError(f"asset id '{asset.id}' already exists")
            self._assets[asset.id] = asset
            self._note_id(asset.id, asset.class_name)
        elif kind == "remove":
            asset_id = edit["asset"]["id"]
            if asset_id not in self._assets:
                raise SceneError(f"unknown asset id '{asset_id}'")
            del self._assets[asset_id]
        elif kind == "set_pose":
            self.asset(edit["id"]).pose = RigidTransform.from_dict(edit["new"])
        elif kind == "set_property":
            a = self.asset(edit["id"])
            if edit["new"] == _ABSENT:
                a.properties.pop(edit["key"], None)
            else:
                a.properties[edit["key"]] = edit["new"]
        elif kind == "set_environment":
            self.environment = EnvironmentState.from_dict(edit["new"])
        else:
            raise SceneError(f"unknown edit kind '{kind}'")

    def _revert_edit(self, edit: dict):
        kind = edit["kind"]
        if kind == "add":
            del self._assets[edit["asset"]["id"]]
        elif kind == "remove":
            asset = SceneAsset.from_dict(edit["asset"])
            items = list(self._assets.items())
            items.insert(edit["position"], (asset.id, asset))
            self._assets = dict(items)
        elif kind == "set_pose":
            self.asset(edit["id"]).pose = RigidTransform.from_dict(edit["old"])
        elif kind == "set_property":
            a = self.asset(edit["id"])
            if edit["old"] == _ABSENT:
                a.properties.pop(edit["key"], None)
            else:
                a.properties[edit["key"]] = edit["old"]
        elif kind == "set_environment":
            self.environment = EnvironmentState.from_dict(edit["old"])

    def apply_diff(self, diff: SceneDiff):
        with self._lock:
            for e in diff.edits:
                self._apply_edit(e)
            self._recompute_center()
            self.revision += 1

    def revert_diff(self, diff: SceneDiff):
        with self._lock:
            for e in reversed(diff.edits):
                self._revert_edit(e)
            self._recompute_center()
            self.revision += 1

    # ---- public edit operations ----

    def add_asset(self, class_name: str, pose: RigidTransform,
                  overrides: dict | None = None,
                  created_by: str = "user",
                  provenance: str = "direct") -> tuple[str, SceneDiff]:
        overrides = overrides or {}
        entry = self.catalog.require(class_name)
        with self._lock:
            asset = SceneAsset(
                id=self._next_id(class_name),
                class_name=class_name,
                kind=entry.kind,
                path=entry.rel_path,
                pose=pose,
                uniform_scale=float(overrides.get("uniform_scale",
                                                  entry.default_scale)),
                properties=dict(overrides.get("properties", {})),
                created_by=created_by,
            )
            diff = SceneDiff(edits=[{"kind": "add", "asset": asset.to_dict()}],
                             provenance=provenance)
            self._assets[asset.id] = asset
            self._recompute_center()
            self.revision += 1
            return asset.id, diff

    def remove_asset(self, asset_id: str, provenance: str = "direct") -> SceneDiff:
        with self._lock:
            asset = self.asset(asset_id)
            position = list(self._assets).index(asset_id)
            diff = SceneDiff(edits=[{"kind": "remove", "asset": asset.to_dict(),
                                     "position": position}],
                             provenance=provenance)
            del self._assets[asset_id]
            self._recompute_center()
            self.revision += 1
            return diff

    def set_pose(self, asset_id: str, pose: RigidTransform,
                 provenance: str = "direct") -> SceneDiff:
        with self._lock:
            asset = self.asset(asset_id)
            diff = SceneDiff(edits=[{"kind": "set_pose", "id": asset_id,
                                     "old": asset.pose.to_dict(),
                                     "new": pose.to_dict()}],
                             provenance=provenance)
            asset.pose = pose
            self._recompute_center()
            self.revision += 1
            return diff

    def set_property(self, asset_id: str, key: str, value,
                     provenance: str = "direct") -> SceneDiff:
        with self._lock:
            asset = self.asset(asset_id)
            old = asset.properties.get(key, _ABSENT)
            diff = SceneDiff(edits=[{"kind": "set_property", "id": asset_id,
                                     "key": key, "old": old, "new": value}],
                             provenance=provenance)
            asset.properties[key] = value
            self._recompute_center()
            self.revision += 1
            return diff

    def set_environment(self, env: EnvironmentState,
                        provenance: str = "direct") -> SceneDiff:
        with self._lock:
            diff = SceneDiff(edits=[{"kind": "set_environment",
                                     "old": self.environment.to_dict(),
                                     "new": env.to_dict()}],
                             provenance=provenance)
            self.environment = env
            self._recompute_center()
            self.revision += 1
            return diff

    def arrange(self, ids: list[str], pattern: str, spacing: float,
                origin, provenance: str = "direct") -> SceneDiff:
        """Place assets on a line (+x), a circle of circumference n*spacing,
        or a row-major square grid; orientations are preserved."""
        if pattern not in ARRANGE_PATTERNS:
            raise SceneError(f"unknown pattern '{pattern}'")
        if spacing <= 0:
            raise SceneError("spacing must be positive")
        if not ids:
            raise SceneError("arrange needs at least one asset id")
        base = (self.anchor(origin) if isinstance(origin, str)
                else np.asarray(origin, dtype=np.float64).reshape(3))
        n = len(ids)
        targets = []
        for i in range(n):
            if n == 1:
                offset = np.zeros(3)
            elif pattern == "line":
                offset = np.array([i * spacing, 0.0, 0.0])
            elif pattern == "circle":
                radius = spacing * n / (2.0 * math.pi)
                theta = 2.0 * math.pi * i / n
                offset = np.array([radius * math.cos(theta),
                                   radius * math.sin(theta), 0.0])
            else:
                cols = math.ceil(math.sqrt(n))
                offset = np.array([(i % cols) * spacing,
                                   (i // cols) * spacing, 0.0])
            targets.append(base + offset)
        with self._lock:
            for asset_id in ids:
                self.asset(asset_id)  # validate all before touching any
            edits = []
            for asset_id, target in zip(ids, targets):
                asset = self.asset(asset_id)
                new_pose = RigidTransform(asset.pose.rotation.copy(), target)
                edits.append({"kind": "set_pose", "id": asset_id,
                              "old": asset.pose.to_dict(),
                              "new": new_pose.to_dict()})
                asset.pose = new_pose
            self._recompute_center()
            self.revision += 1
            return SceneDiff(edits=edits, provenance=provenance)

    # ---- persistence ----

    def save(self, path):
        Path(path).write_text(json.dumps(self.snapshot(), indent=2) + "\n")


def scene_equal(a: SceneGraph | dict, b: SceneGraph | dict, tol: float = 1e-12) -> bool:
    """Structural equality of scene snapshots with numeric tolerance."""
    da = a.snapshot() if isinstance(a, SceneGraph) else a
    db = b.snapshot() if isinstance(b, SceneGraph) else b

    def eq(x, y):
        if isinstance(x, dict) and isinstance(y, dict):
            return x.keys() == y.keys() and all(eq(x[k], y[k]) for k in x)
        if isinstance(x, (list, tuple)) and isinstance(y, (list, tuple)):
            return len(x) == len(y) and all(eq(i, j) for i, j in zip(x, y))
        if isinstance(x, float) or isinstance(y, float):
            if isinstance(x, bool) != isinstance(y, bool):
                return False
            return abs(float(x) - float(y)) <= tol
        return x == y

    return eq(da, db)


def load_scene(path, catalog: AssetCatalog | None = None) -> SceneGraph:
    """Load a scene JSON; the catalog comes from catalog_ref unless given."""
    path = Path(path)
    doc = json.loads(path.read_text())
    ref = doc.get("catalog_ref")
    if catalog is None:
        if not ref:
            raise SceneError("scene file lacks catalog_ref and no catalog given")
        catalog = load_catalog((path.parent / ref).resolve())
    anchors = {k: v for k, v in doc.get("anchors", {}).items() if k != "scene_center"}
    scene = SceneGraph(catalog,
                       environment=EnvironmentState.from_dict(doc.get("environment", {})),
                       anchors=anchors, catalog_ref=ref)
    for asset_dict in doc.get("assets", []):
        asset = SceneAsset.from_dict(asset_dict)
        if asset.id in scene._assets:
            raise SceneError(f"duplicate asset id '{asset.id}' in scene file")
        scene._assets[asset.id] = asset
        scene._note_id(asset.id, asset.class_name)
    scene._recompute_center()
    return scene
