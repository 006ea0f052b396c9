"""Oriented point clouds and their text formats (ASCII PLY and XYZ)."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, FormatError

NORMAL_TOL = 1e-6


@dataclass
class OrientedPointCloud:
    points: np.ndarray    # (N, 3) meters
    normals: np.ndarray   # (N, 3) unit vectors

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        self.normals = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
        if len(self.points) != len(self.normals):
            raise ValueError("points and normals lengths differ")
        if not np.all(np.isfinite(self.points)):
            raise DataError("non-finite point coordinate")
        norms = np.linalg.norm(self.normals, axis=1)
        if len(norms) and np.any(np.abs(norms - 1.0) > NORMAL_TOL):
            raise ValueError("normals must be unit length")

    def __len__(self) -> int:
        return len(self.points)

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def flipped(self) -> "OrientedPointCloud":
        return OrientedPointCloud(self.points.copy(), -self.normals)


def _parse_ascii_ply(lines: list[str]) -> np.ndarray:
    if len(lines) < 2 or lines[1].split() != ["format", "ascii", "1.0"]:
        raise FormatError("expected 'format ascii 1.0' PLY")
    props: list[str] = []
    count = None
    i = 2
    while i < len(lines):
        parts = lines[i].split()
        i += 1
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "end_header":
            break
        if parts[0] == "element":
            if parts[1] != "vertex":
                raise FormatError(f"unexpected element '{parts[1]}'")
            count = int(parts[2])
        elif parts[0] == "property":
            props.append(parts[-1])
        else:
            raise FormatError(f"unrecognized header line '{parts[0]}'")
    else:
        raise FormatError("unterminated PLY header")
    if count is None:
        raise FormatError("missing element vertex")
    if props[:3] != ["x", "y", "z"]:
        raise FormatError("vertex must start with x, y, z")
    if len(props) > 3 and props[3:6] != ["nx", "ny", "nz"]:
        raise FormatError("optional normal fields must be nx, ny, nz")
    ncols = len(props)
    rows = []
    for k in range(count):
        if i + k >= len(lines):
            raise FormatError(f"vertex data truncated at row {k}")
        vals = lines[i + k].split()
        if len(vals) != ncols:
            raise FormatError(f"row {k} has {len(vals)} columns, expected {ncols}")
        rows.append([float(v) for v in vals])
    return np.array(rows, dtype=np.float64).reshape(count, ncols)


def load_point_cloud(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray | None]:
    """Read x,y,z[,nx,ny,nz] from an ASCII PLY or whitespace XYZ file.

    Returns (points, normals) with normals None when the file has no normal
    columns; run estimate_normals before reconstruction in that case.
    """
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("empty point cloud file")
    if lines[0] == "ply":
        table = _parse_ascii_ply(lines)
    else:
        rows = []
        for k, ln in enumerate(lines):
            if ln.startswith("#"):
                continue
            vals = ln.split()
            if len(vals) not in (3, 6):
                raise FormatError(f"row {k} has {len(vals)} columns, expected 3 or 6")
            rows.append([float(v) for v in vals])
        if not rows:
            raise FormatError("no data rows in XYZ file")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise FormatError("mixed column counts in XYZ file")
        table = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(table)):
        raise DataError(f"non-finite value in record "
                        f"{int(np.nonzero(~np.isfinite(table).all(axis=1))[0][0])}")
    points = table[:, :3]
    if table.shape[1] < 6:
        return points, None
    normals = table[:, 3:6]
    lens = np.linalg.norm(normals, axis=1)
    if np.any(lens == 0):
        raise DataError("zero-length normal present")
    return points, normals / lens[:, None]


def save_point_cloud(path: str | os.PathLike, cloud: OrientedPointCloud):
    """Write as ASCII PLY with normals."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(cloud)}\n")
        for name in ("x", "y", "z", "nx", "ny", "nz"):
            fh.write(f"property float {name}\n")
        fh.write("end_header\n")
        for p, n in zip(cloud.points, cloud.normals):
            fh.write(f"{p[0]:.9g} {p[1]:.9g} {p[2]:.9g} "
                     f"{n[0]:.9g} {n[1]:.9g} {n[2]:.9g}\n")
