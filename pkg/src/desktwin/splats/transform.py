"""Rigid transformation of splat sets.

A transform (R, t) moves every gaussian center to R*mu + t and rotates its
orientation quaternion; opacity, scale, and color coefficients are untouched
and insertion order is preserved.
"""
from __future__ import annotations

import numpy as np

from ..geometry import RigidTransform, quat_from_matrix
from .types import SplatSet


def transform_set(T: RigidTransform, splat_set: SplatSet) -> SplatSet:
    if len(splat_set) == 0:
        return splat_set.copy()
    positions = splat_set.positions @ T.rotation.T + T.translation
    qr = quat_from_matrix(T.rotation)
    w, x, y, z = qr
    # Hamilton product qr * q, vectorized over the set.
    q = splat_set.orientations
    out_q = np.empty_like(q)
    out_q[:, 0] = w * q[:, 0] - x * q[:, 1] - y * q[:, 2] - z * q[:, 3]
    out_q[:, 1] = w * q[:, 1] + x * q[:, 0] + y * q[:, 3] - z * q[:, 2]
    out_q[:, 2] = w * q[:, 2] - x * q[:, 3] + y * q[:, 0] + z * q[:, 1]
    out_q[:, 3] = w * q[:, 3] + x * q[:, 2] - y * q[:, 1] + z * q[:, 0]
    out_q /= np.linalg.norm(out_q, axis=1, keepdims=True)
    return SplatSet(
        positions=positions,
        orientations=out_q,
        scales=splat_set.scales.copy(),
        opacities=splat_set.opacities.copy(),
        sh_coeffs=splat_set.sh_coeffs.copy(),
        sh_degree=splat_set.sh_degree,
    )
