"""Kinematic stand-ins for behavior-tagged assets.

An asset whose properties carry behavior="skidpad" orbits its stored pose on
a fixed circle; behavior="jaywalking" ping-pongs along +y as a straight
crossing. Animation is evaluated at render time from a time parameter, never
mutating the scene, so renders stay pure functions of (scene, camera, time).
"""
from __future__ import annotations

import math

import numpy as np

from ..geometry import RigidTransform
from .graph import SceneAsset

SKIDPAD_RADIUS = 2.0       # meters
SKIDPAD_OMEGA = 0.5        # rad/s
JAYWALK_SPEED = 1.2        # m/s
JAYWALK_HALF_SPAN = 4.0    # meters


def _yaw_rotation(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def animated_pose(asset: SceneAsset, time_s: float) -> RigidTransform:
    """Pose at a given time; identity passthrough without a behavior tag."""
    behavior = asset.properties.get("behavior")
    base = asset.pose
    if behavior == "skidpad":
        radius = float(asset.properties.get("behavior_radius", SKIDPAD_RADIUS))
        theta = SKIDPAD_OMEGA * time_s
        offset = np.array([radius * math.cos(theta), radius * math.sin(theta), 0.0])
        heading = _yaw_rotation(theta + math.pi / 2.0)
        return RigidTransform(heading @ base.rotation, base.translation + offset)
    if behavior == "jaywalking":
        span = 2.0 * JAYWALK_HALF_SPAN
        phase = (JAYWALK_SPEED * time_s) % (2.0 * span)
        dist = phase if phase <= span else 2.0 * span - phase
        offset = np.array([0.0, dist - JAYWALK_HALF_SPAN, 0.0])
        facing = _yaw_rotation(math.pi / 2.0 if phase <= span else -math.pi / 2.0)
        return RigidTransform(facing @ base.rotation, base.translation + offset)
    return base
