"""Perspective projection of 3D gaussians to screen-space footprints.

The 2D covariance uses the local-affine approximation: cov2d =
J W Sigma W^T J^T + 0.3*I, with J the perspective Jacobian at the center and
W the world-to-camera rotation. The 0.3 px^2 dilation keeps footprints at
least a third of a pixel wide. A splat's screen support is its 3-sigma
axis-aligned box; both renderers treat alpha as zero outside it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sh import eval_colors
from .types import PinholeCamera, ProjectedSplat, SplatGaussian, SplatSet

COV_DILATION = 0.3
SUPPORT_SIGMA = 3.0


@dataclass
class ProjectedBatch:
    """Vectorized projection of the retained (non-culled) splats of a set.

    Arrays are aligned; `order` lists retained splats sorted by ascending
    depth with insertion order breaking ties.
    """

    mean2d: np.ndarray        # (M, 2)
    cov2d: np.ndarray         # (M, 2, 2)
    inv_cov2d: np.ndarray     # (M, 2, 2)
    depth: np.ndarray         # (M,)
    opacity: np.ndarray       # (M,)
    color: np.ndarray         # (M, 3)
    extent3: np.ndarray       # (M, 2) 3-sigma half extents in pixels
    source_index: np.ndarray  # (M,) index into the original set
    order: np.ndarray         # (M,) permutation: depth-ascending

    def __len__(self) -> int:
        return len(self.depth)


def _covariance3d(orientations: np.ndarray, scales: np.ndarray) -> np.ndarray:
    """Batch 3D covariances R diag(s^2) R^T from unit quaternions; (N, 3, 3)."""
    q = orientations / np.linalg.norm(orientations, axis=1, keepdims=True)
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    R = np.empty((len(q), 3, 3))
    R[:, 0, 0] = 1 - 2 * (y * y + z * z)
    R[:, 0, 1] = 2 * (x * y - w * z)
    R[:, 0, 2] = 2 * (x * z + w * y)
    R[:, 1, 0] = 2 * (x * y + w * z)
    R[:, 1, 1] = 1 - 2 * (x * x + z * z)
    R[:, 1, 2] = 2 * (y * z - w * x)
    R[:, 2, 0] = 2 * (x * z - w * y)
    R[:, 2, 1] = 2 * (y * z + w * x)
    R[:, 2, 2] = 1 - 2 * (x * x + y * y)
    RS = R * (scales**2)[:, None, :]
    return RS @ np.swapaxes(R, 1, 2)


def project_set(cam: PinholeCamera, splat_set: SplatSet) -> ProjectedBatch:
    """Project a whole set, culling by depth range and viewport overlap."""
    n = len(splat_set)
    if n == 0:
        empty2 = np.zeros((0, 2))
        empty22 = np.zeros((0, 2, 2))
        z0 = np.zeros(0)
        return ProjectedBatch(empty2, empty22, empty22, z0, z0, np.zeros((0, 3)),
                              empty2, np.zeros(0, dtype=int), np.zeros(0, dtype=int))
    W = cam.world_to_camera.rotation
    t = cam.world_to_camera.translation
    p_cam = splat_set.positions @ W.T + t
    x, y, z = p_cam[:, 0], p_cam[:, 1], p_cam[:, 2]

    keep = (z > cam.near) & (z < cam.far)
    idx = np.nonzero(keep)[0]
    if len(idx) == 0:
        return project_set(cam, SplatSet.empty(splat_set.sh_degree))
    x, y, z = x[idx], y[idx], z[idx]

    mean2d = np.stack([cam.fx * x / z + cam.cx, cam.fy * y / z + cam.cy], axis=1)

    cov3 = _covariance3d(splat_set.orientations[idx], splat_set.scales[idx])
    # M = J @ W rows: J = [[fx/z, 0, -fx x/z^2], [0, fy/z, -fy y/z^2]]
    inv_z = 1.0 / z
    J = np.zeros((len(idx), 2, 3))
    J[:, 0, 0] = cam.fx * inv_z
    J[:, 0, 2] = -cam.fx * x * inv_z**2
    J[:, 1, 1] = cam.fy * inv_z
    J[:, 1, 2] = -cam.fy * y * inv_z**2
    M = J @ W
    cov2 = M @ cov3 @ np.swapaxes(M, 1, 2)
    cov2[:, 0, 0] += COV_DILATION
    cov2[:, 1, 1] += COV_DILATION

    ext = SUPPORT_SIGMA * np.sqrt(np.stack([cov2[:, 0, 0], cov2[:, 1, 1]], axis=1))
    # Viewport test against the span of pixel centers [0, w-1] x [0, h-1].
    visible = ((mean2d[:, 0] + ext[:, 0] >= 0.0)
               & (mean2d[:, 0] - ext[:, 0] <= cam.width - 1.0)
               & (mean2d[:, 1] + ext[:, 1] >= 0.0)
               & (mean2d[:, 1] - ext[:, 1] <= cam.height - 1.0))
    sub = np.nonzero(visible)[0]
    idx, mean2d, cov2, ext, z = idx[sub], mean2d[sub], cov2[sub], ext[sub], z[sub]

    det = cov2[:, 0, 0] * cov2[:, 1, 1] - cov2[:, 0, 1] * cov2[:, 1, 0]
    inv = np.empty_like(cov2)
    inv[:, 0, 0] = cov2[:, 1, 1] / det
    inv[:, 1, 1] = cov2[:, 0, 0] / det
    inv[:, 0, 1] = -cov2[:, 0, 1] / det
    inv[:, 1, 0] = -cov2[:, 1, 0] / det

    dirs = splat_set.positions[idx] - cam.center
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    colors = eval_colors(splat_set.sh_coeffs[idx], splat_set.sh_degree, dirs)

    order = np.argsort(z, kind="stable")
    return ProjectedBatch(
        mean2d=mean2d, cov2d=cov2, inv_cov2d=inv, depth=z,
        opacity=splat_set.opacities[idx].copy(), color=colors, extent3=ext,
        source_index=idx, order=order,
    )


def project_splat(cam: PinholeCamera, g: SplatGaussian) -> ProjectedSplat | None:
    """Project one gaussian; returns None when culled."""
    batch = project_set(cam, SplatSet.from_splats([g]))
    if len(batch) == 0:
        return None
    return ProjectedSplat(
        mean2d=batch.mean2d[0],
        cov2d=batch.cov2d[0],
        depth=float(batch.depth[0]),
        opacity=float(batch.opacity[0]),
        color=batch.color[0],
        source_index=0,
    )
