"""Camera construction helpers: look-at poses and scene orbit viewpoints."""
from __future__ import annotations

import numpy as np

from .geometry import RigidTransform
from .splats.types import PinholeCamera


def look_at(eye, target, up=(0.0, 0.0, 1.0)) -> RigidTransform:
    """World-to-camera transform for a camera at `eye` looking at `target`.

    Camera axes: +z forward, +x right, +y down (pinhole convention).
    """
    eye = np.asarray(eye, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    forward = target - eye
    n = np.linalg.norm(forward)
    if n == 0:
        raise ValueError("eye and target coincide")
    forward /= n
    up = np.asarray(up, dtype=np.float64)
    right = np.cross(forward, up)
    rn = np.linalg.norm(right)
    if rn < 1e-9:  # forward parallel to up: pick any perpendicular
        alt = np.array([1.0, 0.0, 0.0])
        right = np.cross(forward, alt)
        rn = np.linalg.norm(right)
    right /= rn
    down = np.cross(forward, right)
    R = np.stack([right, down, forward])  # rows: camera axes in world coords
    return RigidTransform(rotation=R, translation=-R @ eye)


def orbit_camera(target, azimuth_deg: float, elevation_deg: float,
                 distance: float, width: int = 320, height: int = 240,
                 fx: float | None = None, near: float = 0.05,
                 far: float = 500.0) -> PinholeCamera:
    """Camera on a sphere around `target`; azimuth 0 looks from +x, z is up."""
    az = np.deg2rad(azimuth_deg)
    el = np.deg2rad(elevation_deg)
    target = np.asarray(target, dtype=np.float64)
    eye = target + distance * np.array([
        np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)])
    fx = fx if fx is not None else 0.8 * max(width, height)
    return PinholeCamera(fx=fx, fy=fx, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
                         width=width, height=height, near=near, far=far,
                         world_to_camera=look_at(eye, target))
