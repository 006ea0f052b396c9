"""Triangle meshes: storage, OBJ/PLY output, and topology utilities."""
from __future__ import annotations

import os
import struct
from collections import Counter
from dataclasses import dataclass

import numpy as np

DEGENERATE_AREA = 1e-12


@dataclass
class TriangleMesh:
    vertices: np.ndarray    # (V, 3)
    triangles: np.ndarray   # (T, 3) int indices

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if len(self.triangles) and (self.triangles.min() < 0
                                    or self.triangles.max() >= len(self.vertices)):
            raise ValueError("triangle index out of range")

    def triangle_areas(self) -> np.ndarray:
        a = self.vertices[self.triangles[:, 0]]
        b = self.vertices[self.triangles[:, 1]]
        c = self.vertices[self.triangles[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def without_degenerate(self) -> "TriangleMesh":
        keep = self.triangle_areas() > DEGENERATE_AREA
        return TriangleMesh(self.vertices, self.triangles[keep])

    def welded(self) -> "TriangleMesh":
        """Merge bitwise-identical vertex positions and drop triangles that
        collapse to an edge; a collapsed triangle's neighbors become direct
        neighbors, so closed meshes stay closed."""
        seen: dict[bytes, int] = {}
        remap = np.empty(len(self.vertices), dtype=np.int64)
        order: list[int] = []
        for i, v in enumerate(self.vertices):
            key = v.tobytes()
            idx = seen.get(key)
            if idx is None:
                idx = len(order)
                seen[key] = idx
                order.append(i)
            remap[i] = idx
        tris = remap[self.triangles]
        distinct = ((tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2])
                    & (tris[:, 0] != tris[:, 2]))
        return TriangleMesh(self.vertices[order], tris[distinct])

    def edge_use_counts(self) -> Counter:
        counts: Counter = Counter()
        for tri in self.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                counts[(min(a, b), max(a, b))] += 1
        return counts

    def is_watertight(self) -> bool:
        """Every edge shared by exactly two triangles."""
        if len(self.triangles) == 0:
            return False
        return all(c == 2 for c in self.edge_use_counts().values())

    def connected_components(self) -> list[np.ndarray]:
        """Triangle index groups connected through shared vertices."""
        parent = list(range(len(self.vertices)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for tri in self.triangles:
            r = find(tri[0])
            for v in tri[1:]:
                parent[find(v)] = r
        groups: dict[int, list[int]] = {}
        for t, tri in enumerate(self.triangles):
            groups.setdefault(find(tri[0]), []).append(t)
        return [np.array(g) for g in groups.values()]

    def largest_components(self, min_triangles: int) -> "TriangleMesh":
        """Drop components smaller than min_triangles and unused vertices."""
        keep_tris: list[int] = []
        for comp in self.connected_components():
            if len(comp) >= min_triangles:
                keep_tris.extend(comp.tolist())
        tris = self.triangles[np.sort(np.array(keep_tris, dtype=np.int64))] \
            if keep_tris else np.zeros((0, 3), dtype=np.int64)
        used = np.unique(tris)
        remap = np.full(len(self.vertices), -1, dtype=np.int64)
        remap[used] = np.arange(len(used))
        return TriangleMesh(self.vertices[used],
                            remap[tris] if len(tris) else tris)

    def signed_volume(self) -> float:
        """Divergence-theorem volume; sign follows triangle orientation."""
        a = self.vertices[self.triangles[:, 0]]
        b = self.vertices[self.triangles[:, 1]]
        c = self.vertices[self.triangles[:, 2]]
        return float(np.sum(np.einsum("ij,ij->i", a, np.cross(b, c))) / 6.0)


def save_mesh_obj(path: str | os.PathLike, mesh: TriangleMesh):
    with open(path, "w", encoding="ascii") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def load_mesh_obj(path: str | os.PathLike) -> TriangleMesh:
    vertices, triangles = [], []
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                for k in range(1, len(idx) - 1):  # fan-triangulate polygons
                    triangles.append([idx[0], idx[k], idx[k + 1]])
    return TriangleMesh(np.array(vertices, dtype=np.float64).reshape(-1, 3),
                        np.array(triangles, dtype=np.int64).reshape(-1, 3))


def save_mesh_ply(path: str | os.PathLike, mesh: TriangleMesh):
    """Binary little-endian PLY with uchar-count int-index faces."""
    header = [
        "ply", "format binary_little_endian 1.0",
        f"element vertex {len(mesh.vertices)}",
        "property float x", "property float y", "property float z",
        f"element face {len(mesh.triangles)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(mesh.vertices, dtype="<f4").tobytes())
        for t in mesh.triangles:
            fh.write(struct.pack("<B3i", 3, int(t[0]), int(t[1]), int(t[2])))
