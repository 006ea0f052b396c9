"""Core splat, camera, and image types.

SplatSet keeps struct-of-arrays storage so projection and rendering stay
vectorized; SplatGaussian is the per-record view used at API boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import RigidTransform

QUAT_NORM_TOL = 1e-6


def sh_degree_for_coeff_count(n_coeffs: int) -> int:
    """Degree L such that n_coeffs == (L+1)^2 per channel, or raise."""
    for degree in range(4):
        if (degree + 1) ** 2 == n_coeffs:
            return degree
    raise ValueError(f"{n_coeffs} coefficients per channel is not (L+1)^2 for L in 0..3")


@dataclass
class SplatGaussian:
    """One 3D gaussian primitive.

    Attributes:
        opacity: base opacity in (0, 1).
        position: world-space center, meters (3,).
        orientation: unit quaternion (w, x, y, z).
        scale: positive per-axis standard deviations, meters (3,).
        sh_coeffs: spherical-harmonic color coefficients, shape (3, (L+1)^2),
            row per RGB channel, column 0 the constant term.
    """

    opacity: float
    position: np.ndarray
    orientation: np.ndarray
    scale: np.ndarray
    sh_coeffs: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64).reshape(3)
        self.orientation = np.asarray(self.orientation, dtype=np.float64).reshape(4)
        self.scale = np.asarray(self.scale, dtype=np.float64).reshape(3)
        self.sh_coeffs = np.asarray(self.sh_coeffs, dtype=np.float64)
        if self.sh_coeffs.ndim != 2 or self.sh_coeffs.shape[0] != 3:
            raise ValueError("sh_coeffs must have shape (3, (L+1)^2)")
        self.validate()

    def validate(self):
        if not 0.0 < self.opacity < 1.0:
            raise ValueError(f"opacity {self.opacity} outside (0, 1)")
        if abs(np.linalg.norm(self.orientation) - 1.0) > QUAT_NORM_TOL:
            raise ValueError("orientation quaternion is not unit length")
        if not np.all(self.scale > 0.0):
            raise ValueError("scale components must be positive")
        sh_degree_for_coeff_count(self.sh_coeffs.shape[1])

    @property
    def sh_degree(self) -> int:
        return sh_degree_for_coeff_count(self.sh_coeffs.shape[1])


class SplatSet:
    """Ordered collection of gaussians sharing one SH degree.

    Storage is struct-of-arrays; insertion order is stable and doubles as the
    depth-sort tie-break key.
    """

    def __init__(self, positions, orientations, scales, opacities, sh_coeffs,
                 sh_degree: int | None = None):
        self.opacities = np.asarray(opacities, dtype=np.float64).reshape(-1)
        n = len(self.opacities)
        if n == 0:
            self.sh_degree = int(sh_degree or 0)
            if not 0 <= self.sh_degree <= 3:
                raise ValueError("sh_degree must be in 0..3")
            self.positions = np.zeros((0, 3))
            self.orientations = np.zeros((0, 4))
            self.scales = np.zeros((0, 3))
            self.sh_coeffs = np.zeros((0, 3, (self.sh_degree + 1) ** 2))
            return
        self.positions = np.asarray(positions, dtype=np.float64).reshape(n, 3)
        self.orientations = np.asarray(orientations, dtype=np.float64).reshape(n, 4)
        self.scales = np.asarray(scales, dtype=np.float64).reshape(n, 3)
        self.sh_coeffs = np.asarray(sh_coeffs, dtype=np.float64)  # (N, 3, (L+1)^2)
        if self.sh_coeffs.ndim == 2:
            self.sh_coeffs = self.sh_coeffs[None]
        if self.sh_coeffs.shape[:2] != (n, 3):
            raise ValueError("inconsistent array shapes in SplatSet")
        inferred = sh_degree_for_coeff_count(self.sh_coeffs.shape[2])
        self.sh_degree = int(sh_degree) if sh_degree is not None else inferred
        if self.sh_degree != inferred:
            raise ValueError("sh_degree does not match coefficient count")

    @staticmethod
    def empty(sh_degree: int = 0) -> "SplatSet":
        return SplatSet([], [], [], [], [], sh_degree=sh_degree)

    @staticmethod
    def from_splats(splats: list[SplatGaussian]) -> "SplatSet":
        if not splats:
            return SplatSet.empty()
        degree = splats[0].sh_degree
        for g in splats:
            if g.sh_degree != degree:
                raise ValueError("all splats in a set must share sh_degree")
        return SplatSet(
            positions=np.stack([g.position for g in splats]),
            orientations=np.stack([g.orientation for g in splats]),
            scales=np.stack([g.scale for g in splats]),
            opacities=np.array([g.opacity for g in splats]),
            sh_coeffs=np.stack([g.sh_coeffs for g in splats]),
            sh_degree=degree,
        )

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, i: int) -> SplatGaussian:
        return SplatGaussian(
            opacity=float(self.opacities[i]),
            position=self.positions[i].copy(),
            orientation=self.orientations[i].copy(),
            scale=self.scales[i].copy(),
            sh_coeffs=self.sh_coeffs[i].copy(),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def splats(self) -> list[SplatGaussian]:
        return list(self)

    def copy(self) -> "SplatSet":
        return SplatSet(self.positions.copy(), self.orientations.copy(),
                        self.scales.copy(), self.opacities.copy(),
                        self.sh_coeffs.copy(), sh_degree=self.sh_degree)

    def validate(self):
        n = len(self)
        if n == 0:
            return
        if not np.all((self.opacities > 0) & (self.opacities < 1)):
            raise ValueError("opacities must lie in (0, 1)")
        norms = np.linalg.norm(self.orientations, axis=1)
        if not np.all(np.abs(norms - 1.0) <= QUAT_NORM_TOL):
            raise ValueError("orientations must be unit quaternions")
        if not np.all(self.scales > 0):
            raise ValueError("scales must be positive")


@dataclass(frozen=True)
class PinholeCamera:
    """Pinhole camera: x right, y down, z forward; pixel centers at integer coords."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    world_to_camera: RigidTransform = field(default_factory=RigidTransform.identity)
    near: float = 0.01
    far: float = 1000.0

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not 0 < self.near < self.far:
            raise ValueError("require 0 < near < far")
        if self.width < 1 or self.height < 1:
            raise ValueError("image size must be at least 1x1")

    @property
    def center(self) -> np.ndarray:
        """Camera center in world coordinates."""
        T = self.world_to_camera
        return -T.rotation.T @ T.translation


@dataclass
class ProjectedSplat:
    """Screen-space footprint of one gaussian for a given camera."""

    mean2d: np.ndarray          # (2,) pixels
    cov2d: np.ndarray           # (2, 2) pixels^2, SPD after dilation
    depth: float                # camera-frame z of the center, meters
    opacity: float
    color: np.ndarray           # (3,) RGB in [0, 1], SH evaluated for this view
    source_index: int

    @property
    def extent3(self) -> tuple[float, float]:
        """Half extents of the 3-sigma axis-aligned bounding box, pixels."""
        return (3.0 * float(np.sqrt(self.cov2d[0, 0])),
                3.0 * float(np.sqrt(self.cov2d[1, 1])))


class ImageBuffer:
    """Row-major float image with values in [0, 1]; shape (height, width, channels)."""

    def __init__(self, pixels: np.ndarray):
        pixels = np.asarray(pixels, dtype=np.float64)
        if pixels.ndim == 2:
            pixels = pixels[..., None]
        if pixels.ndim != 3 or pixels.shape[2] not in (1, 3):
            raise ValueError("pixels must have shape (h, w, 1|3)")
        if pixels.size and (pixels.min() < -1e-12 or pixels.max() > 1 + 1e-12):
            raise ValueError("pixel values must lie in [0, 1]")
        self.pixels = np.clip(pixels, 0.0, 1.0)

    @staticmethod
    def zeros(width: int, height: int, channels: int = 3) -> "ImageBuffer":
        return ImageBuffer(np.zeros((height, width, channels)))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def gray(self) -> "ImageBuffer":
        """Channel-mean grayscale reduction."""
        if self.channels == 1:
            return ImageBuffer(self.pixels.copy())
        return ImageBuffer(self.pixels.mean(axis=2, keepdims=True))

    def same_shape(self, other: "ImageBuffer") -> bool:
        return self.pixels.shape == other.pixels.shape
