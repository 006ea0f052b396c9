"""Asset catalog: the closed set of classes a scene may instantiate.

Entries point at a splat PLY or mesh OBJ/PLY on disk, carry a default scale,
and list synonym tags for fuzzy search. Unknown-class errors suggest close
names by edit distance.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CatalogError, FormatError

SUGGESTION_DISTANCE = 2


def edit_distance(a: str, b: str) -> int:
    """Plain Levenshtein distance."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass
class CatalogEntry:
    class_name: str
    kind: str                 # "splat" | "mesh"
    path: Path                # resolved absolute location
    rel_path: str = ""        # as written in the catalog file
    default_scale: float = 1.0
    tags: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("splat", "mesh"):
            raise ValueError(f"unknown representation kind '{self.kind}'")
        if self.default_scale <= 0:
            raise ValueError("default_scale must be positive")
        if not self.rel_path:
            self.rel_path = str(self.path)


class AssetCatalog:
    def __init__(self, entries: dict[str, CatalogEntry], source: Path | None = None,
                 anchors: dict[str, list[float]] | None = None):
        if not entries:
            raise ValueError("catalog must not be empty")
        self.entries = dict(entries)
        self.source = source
        self.anchors = dict(anchors or {})

    def __contains__(self, class_name: str) -> bool:
        return class_name in self.entries

    def __getitem__(self, class_name: str) -> CatalogEntry:
        return self.require(class_name)

    @property
    def class_names(self) -> list[str]:
        return sorted(self.entries)

    def require(self, class_name: str) -> CatalogEntry:
        entry = self.entries.get(class_name)
        if entry is None:
            near = self.suggest(class_name)
            hint = f"; did you mean {', '.join(near)}?" if near else ""
            raise CatalogError(f"unknown asset class '{class_name}'{hint}",
                               suggestions=near)
        return entry

    def suggest(self, name: str, max_distance: int = SUGGESTION_DISTANCE) -> list[str]:
        scored = [(edit_distance(name, c), c) for c in self.entries]
        return [c for d, c in sorted(scored) if d <= max_distance]

    def find_by_tag(self, tag: str) -> list[str]:
        """Classes whose name or tag list matches, exact then substring."""
        tag = tag.lower().strip()
        exact = [c for c, e in self.entries.items()
                 if tag == c or tag in (t.lower() for t in e.tags)]
        if exact:
            return sorted(exact)
        return sorted(c for c, e in self.entries.items()
                      if tag in c or any(tag in t.lower() for t in e.tags))

    def to_dict(self) -> dict:
        return {
            "classes": {
                c: {
                    "representation": {"kind": e.kind, "path": e.rel_path},
                    "default_scale": e.default_scale,
                    "tags": e.tags,
                }
                for c, e in sorted(self.entries.items())
            },
            "anchors": self.anchors,
        }


def load_catalog(path: str | os.PathLike) -> AssetCatalog:
    """Load a catalog JSON; every representation path must resolve."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"catalog is not valid JSON: {e}") from e
    classes = doc.get("classes")
    if not isinstance(classes, dict) or not classes:
        raise FormatError("catalog must define a non-empty 'classes' map")
    entries = {}
    missing = []
    for name, spec in classes.items():
        rep = spec.get("representation", {})
        asset_path = (path.parent / rep.get("path", "")).resolve()
        if not asset_path.is_file():
            missing.append(f"{name} -> {rep.get('path')}")
        entries[name] = CatalogEntry(
            class_name=name,
            kind=rep.get("kind", ""),
            path=asset_path,
            rel_path=rep.get("path", ""),
            default_scale=float(spec.get("default_scale", 1.0)),
            tags=list(spec.get("tags", [])),
        )
    if missing:
        raise FormatError("unresolvable asset paths: " + "; ".join(missing))
    return AssetCatalog(entries, source=path, anchors=doc.get("anchors", {}))


def save_catalog(path: str | os.PathLike, catalog: AssetCatalog):
    Path(path).write_text(json.dumps(catalog.to_dict(), indent=2) + "\n")
