"""Full surface reconstruction: oriented cloud to watertight mesh.

Stages: splat normals to a vector grid, take its divergence, solve the
Poisson system for the indicator field, pick the isovalue as the mean
indicator sampled at the input points, and run marching cubes. Zero-area
triangles and splatting-noise components below a triangle-count threshold
are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import OrientedPointCloud
from .grid import DEFAULT_PAD, divergence, splat_vector_field
from .marching_cubes import marching_cubes
from .mesh import TriangleMesh
from .poisson import CGReport, solve_poisson

MIN_COMPONENT_TRIANGLES = 10


@dataclass
class ReconReport:
    solver: CGReport
    isovalue: float
    raw_triangles: int
    kept_triangles: int


def reconstruct(cloud: OrientedPointCloud, res: tuple[int, int, int] = (64, 64, 64),
                tol: float = 1e-6, pad: float = DEFAULT_PAD,
                max_iter: int = 2000,
                min_component: int = MIN_COMPONENT_TRIANGLES,
                ) -> tuple[TriangleMesh, ReconReport]:
    if len(cloud) == 0:
        raise ValueError("cannot reconstruct from an empty cloud")
    field = splat_vector_field(cloud, res, pad)
    rhs = divergence(field)
    indicator, solver = solve_poisson(rhs, tol=tol, max_iter=max_iter)
    isovalue = float(np.mean(indicator.sample_trilinear(cloud.points)))
    mesh = marching_cubes(indicator, isovalue)
    raw = len(mesh.triangles)
    mesh = mesh.welded().without_degenerate().largest_components(min_component)
    return mesh, ReconReport(solver=solver, isovalue=isovalue,
                             raw_triangles=raw, kept_triangles=len(mesh.triangles))
