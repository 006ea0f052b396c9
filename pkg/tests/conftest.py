import numpy as np
import pytest

from desktwin.geometry import RigidTransform, random_rotation
from desktwin.splats import PinholeCamera, SplatSet


def make_camera(width=64, height=64, fx=60.0, fov_center=None, near=0.1, far=100.0,
                world_to_camera=None) -> PinholeCamera:
    cx, cy = fov_center if fov_center else ((width - 1) / 2.0, (height - 1) / 2.0)
    return PinholeCamera(fx=fx, fy=fx, cx=cx, cy=cy, width=width, height=height,
                         near=near, far=far,
                         world_to_camera=world_to_camera or RigidTransform.identity())


def random_scene(rng: np.random.Generator, n: int, sh_degree: int = 1,
                 depth_range=(4.0, 8.0), spread=1.5, scale_range=(0.05, 0.4)) -> SplatSet:
    """Scene in front of an identity camera looking down +z."""
    z = rng.uniform(*depth_range, size=n)
    xy = rng.uniform(-spread, spread, size=(n, 2))
    positions = np.column_stack([xy, z])
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    scales = rng.uniform(*scale_range, size=(n, 3))
    opacities = rng.uniform(0.2, 0.95, size=n)
    dim = (sh_degree + 1) ** 2
    sh = rng.uniform(-0.4, 0.4, size=(n, 3, dim))
    sh[:, :, 1:] *= 0.25  # keep colors inside the clamp
    return SplatSet(positions, q, scales, opacities, sh, sh_degree=sh_degree)


def random_transform(rng: np.random.Generator) -> RigidTransform:
    return RigidTransform(random_rotation(rng), rng.uniform(-2, 2, size=3))


def toy_fit_problem(seed=7):
    """Known 10-splat scene, 4 training orbits, a held-out view, and a
    perturbed copy to recover. Shared by the fit tests and acceptance."""
    from desktwin.cameras import orbit_camera
    from desktwin.splats import render_reference

    rng = np.random.default_rng(seed)
    scene = random_scene(rng, 10, sh_degree=1, depth_range=(-1.0, 1.0),
                         spread=1.0, scale_range=(0.15, 0.5))
    views = []
    for az in (0, 90, 180, 270):
        cam = orbit_camera([0, 0, 0], az, 20.0, 6.0, width=64, height=64, fx=60.0)
        views.append((cam, render_reference(cam, scene)))
    held_cam = orbit_camera([0, 0, 0], 45, 35.0, 6.0, width=64, height=64, fx=60.0)
    held_img = render_reference(held_cam, scene)

    perturbed = scene.copy()
    perturbed.positions += rng.normal(scale=0.10, size=perturbed.positions.shape)
    perturbed.scales *= np.exp(rng.normal(scale=0.2, size=perturbed.scales.shape))
    perturbed.sh_coeffs += rng.normal(scale=0.05, size=perturbed.sh_coeffs.shape)
    q = perturbed.orientations + rng.normal(scale=0.05, size=(10, 4))
    perturbed.orientations = q / np.linalg.norm(q, axis=1, keepdims=True)
    return scene, perturbed, views, held_cam, held_img


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
