"""Marching-cubes isosurface extraction on a scalar grid.

Classic 256-case table with linear interpolation along crossed edges; a
corner is inside when its value is strictly below the isovalue. Vertices are
welded through global edge keys, so shared cell faces reuse identical
vertices and closed level sets come out watertight. Ambiguous face cases
resolve by the table's default triangulation.
"""
from __future__ import annotations

import numpy as np

from .grid import ScalarGrid
from .mesh import TriangleMesh
from .mc_tables import EDGE_CORNERS, TRI_TABLE

CORNER_OFFSETS = np.array([
    (0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
    (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1),
], dtype=np.int64)

# crossings within this world distance of a node snap onto it, so welding
# collapses the sub-threshold slivers that near-node hits leave behind;
# 2e-6 m keeps any surviving triangle's area above the degenerate cutoff
SNAP_WORLD = 2e-6

# edge -> (lower corner offset, axis) for global welding keys
_EDGE_AXIS = []
for a, b in EDGE_CORNERS:
    oa, ob = CORNER_OFFSETS[a], CORNER_OFFSETS[b]
    axis = int(np.nonzero(oa != ob)[0][0])
    lower = oa if oa[axis] < ob[axis] else ob
    _EDGE_AXIS.append((lower, axis))


def marching_cubes(grid: ScalarGrid, isovalue: float) -> TriangleMesh:
    v = grid.values
    nx, ny, nz = grid.resolution
    inside = v < isovalue

    # per-cell case index, vectorized so empty space costs no Python time
    case = np.zeros((nx - 1, ny - 1, nz - 1), dtype=np.uint16)
    for c, (ox, oy, oz) in enumerate(CORNER_OFFSETS):
        block = inside[ox:nx - 1 + ox, oy:ny - 1 + oy, oz:nz - 1 + oz]
        case |= block.astype(np.uint16) << c
    active = np.argwhere((case != 0) & (case != 255))

    spacing = grid.spacing
    origin = grid.box.origin
    snap_t = np.minimum(SNAP_WORLD / spacing, 0.1)
    edge_vertex: dict[tuple[int, int, int, int], int] = {}
    vertices: list[np.ndarray] = []
    triangles: list[tuple[int, int, int]] = []

    for i, j, k in active:
        cell = np.array((i, j, k))
        tris = TRI_TABLE[case[i, j, k]]
        ids = {}
        for e in set(tris):
            lower, axis = _EDGE_AXIS[e]
            node = cell + lower
            key = (int(node[0]), int(node[1]), int(node[2]), axis)
            idx = edge_vertex.get(key)
            if idx is None:
                a, b = EDGE_CORNERS[e]
                na = cell + CORNER_OFFSETS[a]
                nb = cell + CORNER_OFFSETS[b]
                va = v[na[0], na[1], na[2]]
                vb = v[nb[0], nb[1], nb[2]]
                t = (isovalue - va) / (vb - va)
                eps = snap_t[axis]
                if t < eps:
                    t = 0.0
                elif t > 1.0 - eps:
                    t = 1.0
                pos = origin + spacing * (na + t * (nb - na))
                idx = len(vertices)
                vertices.append(pos)
                edge_vertex[key] = idx
            ids[e] = idx
        for n in range(0, len(tris), 3):
            triangles.append((ids[tris[n]], ids[tris[n + 1]], ids[tris[n + 2]]))

    return TriangleMesh(
        np.array(vertices, dtype=np.float64).reshape(-1, 3),
        np.array(triangles, dtype=np.int64).reshape(-1, 3),
    )
