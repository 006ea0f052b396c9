"""Regular grids over an axis-aligned box, normal-field splatting, and the
central-difference divergence operator.

Grid nodes include both box faces: node (i,j,k) sits at
origin + (i*hx, j*hy, k*hz) with h = extent/(n-1) per axis. Values are
indexed values[i, j, k] (x fastest conceptually, C-order storage).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import OrientedPointCloud

DEFAULT_PAD = 0.1


@dataclass
class GridBox:
    origin: np.ndarray   # (3,)
    extent: np.ndarray   # (3,) edge lengths, all > 0

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=np.float64).reshape(3)
        self.extent = np.asarray(self.extent, dtype=np.float64).reshape(3)
        if not np.all(self.extent > 0):
            raise ValueError("box extent must be positive")


class _Grid:
    def __init__(self, resolution, box: GridBox, values: np.ndarray):
        self.resolution = tuple(int(r) for r in resolution)
        if min(self.resolution) < 2:
            raise ValueError("grid resolution must be >= 2 per axis")
        self.box = box
        self.values = values

    @property
    def spacing(self) -> np.ndarray:
        return self.box.extent / (np.array(self.resolution) - 1)

    def node_coords(self, axis: int) -> np.ndarray:
        n = self.resolution[axis]
        return self.box.origin[axis] + self.spacing[axis] * np.arange(n)

    def world_to_grid(self, points: np.ndarray) -> np.ndarray:
        """Continuous grid coordinates of world points."""
        return (np.asarray(points, dtype=np.float64) - self.box.origin) / self.spacing


class ScalarGrid(_Grid):
    def __init__(self, resolution, box: GridBox, values: np.ndarray | None = None):
        if values is None:
            values = np.zeros(resolution)
        values = np.asarray(values, dtype=np.float64).reshape(resolution)
        super().__init__(resolution, box, values)

    def sample_trilinear(self, points: np.ndarray) -> np.ndarray:
        """Trilinear interpolation at world points (clamped to the box)."""
        g = self.world_to_grid(points)
        res = np.array(self.resolution)
        g = np.clip(g, 0.0, res - 1.0)
        i0 = np.minimum(g.astype(np.int64), res - 2)
        f = g - i0
        v = self.values
        out = np.zeros(len(g))
        for dx in (0, 1):
            for dy in (0, 1):
                for dz in (0, 1):
                    w = (np.where(dx, f[:, 0], 1 - f[:, 0])
                         * np.where(dy, f[:, 1], 1 - f[:, 1])
                         * np.where(dz, f[:, 2], 1 - f[:, 2]))
                    out += w * v[i0[:, 0] + dx, i0[:, 1] + dy, i0[:, 2] + dz]
        return out


class VectorGrid(_Grid):
    def __init__(self, resolution, box: GridBox, values: np.ndarray | None = None):
        shape = tuple(resolution) + (3,)
        if values is None:
            values = np.zeros(shape)
        values = np.asarray(values, dtype=np.float64).reshape(shape)
        super().__init__(resolution, box, values)


def bounds_for_cloud(cloud: OrientedPointCloud, pad: float = DEFAULT_PAD) -> GridBox:
    """Cloud AABB expanded by `pad` of its per-axis extent on each side."""
    lo, hi = cloud.aabb()
    extent = hi - lo
    extent = np.where(extent <= 0, 1.0, extent)  # degenerate axes get unit size
    return GridBox(origin=lo - pad * extent, extent=extent * (1 + 2 * pad))


def splat_vector_field(cloud: OrientedPointCloud, res: tuple[int, int, int],
                       pad: float = DEFAULT_PAD, with_weights: bool = False):
    """Deposit unit normals into grid nodes with trilinear weights.

    Node values are weight-normalized so each holds the local mean normal
    direction; nodes never touched stay zero.
    """
    if len(cloud) == 0:
        raise ValueError("cannot splat an empty cloud")
    box = bounds_for_cloud(cloud, pad)
    grid = VectorGrid(res, box)
    weights = np.zeros(res)
    g = grid.world_to_grid(cloud.points)
    resv = np.array(res)
    g = np.clip(g, 0.0, resv - 1.0)
    i0 = np.minimum(g.astype(np.int64), resv - 2)
    f = g - i0
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                w = (np.where(dx, f[:, 0], 1 - f[:, 0])
                     * np.where(dy, f[:, 1], 1 - f[:, 1])
                     * np.where(dz, f[:, 2], 1 - f[:, 2]))
                np.add.at(weights, (i0[:, 0] + dx, i0[:, 1] + dy, i0[:, 2] + dz), w)
                np.add.at(grid.values,
                          (i0[:, 0] + dx, i0[:, 1] + dy, i0[:, 2] + dz),
                          w[:, None] * cloud.normals)
    nz = weights > 0
    grid.values[nz] /= weights[nz][:, None]
    if with_weights:
        return grid, weights
    return grid


def divergence(field: VectorGrid) -> ScalarGrid:
    """Central-difference divergence at interior nodes, zero on the boundary."""
    hx, hy, hz = field.spacing
    v = field.values
    out = np.zeros(field.resolution)
    out[1:-1, :, :] += (v[2:, :, :, 0] - v[:-2, :, :, 0]) / (2 * hx)
    out[:, 1:-1, :] += (v[:, 2:, :, 1] - v[:, :-2, :, 1]) / (2 * hy)
    out[:, :, 1:-1] += (v[:, :, 2:, 2] - v[:, :, :-2, 2]) / (2 * hz)
    out[0, :, :] = out[-1, :, :] = 0.0
    out[:, 0, :] = out[:, -1, :] = 0.0
    out[:, :, 0] = out[:, :, -1] = 0.0
    return ScalarGrid(field.resolution, field.box, out)
