import numpy as np

from desktwin.geometry import quat_normalize
from desktwin.splats import SplatGaussian, SplatSet, project_set, project_splat
from conftest import make_camera, random_scene


def iso_splat(depth, sigma=0.2, opacity=0.5, q=(1, 0, 0, 0)):
    return SplatGaussian(opacity=opacity, position=[0, 0, depth],
                         orientation=quat_normalize(np.array(q, dtype=float)),
                         scale=[sigma, sigma, sigma],
                         sh_coeffs=np.zeros((3, 1)))


def test_on_axis_isotropic_closed_form():
    cam = make_camera(width=64, height=64, fx=80.0)
    d, sigma = 5.0, 0.3
    proj = project_splat(cam, iso_splat(d, sigma))
    assert proj is not None
    expected = (cam.fx * sigma / d) ** 2
    assert np.allclose(proj.mean2d, [cam.cx, cam.cy], atol=1e-9)
    assert np.allclose(proj.cov2d, expected * np.eye(2) + 0.3 * np.eye(2), atol=1e-9)
    assert abs(proj.depth - d) < 1e-12


def test_behind_camera_is_culled():
    cam = make_camera()
    assert project_splat(cam, iso_splat(-3.0)) is None
    assert project_splat(cam, iso_splat(cam.near * 0.5)) is None
    assert project_splat(cam, iso_splat(cam.far * 2.0)) is None


def test_off_screen_is_culled():
    cam = make_camera(width=32, height=32, fx=40.0)
    g = SplatGaussian(opacity=0.5, position=[50.0, 0, 5.0],
                      orientation=[1, 0, 0, 0], scale=[0.05] * 3,
                      sh_coeffs=np.zeros((3, 1)))
    assert project_splat(cam, g) is None


def test_rotation_invariance_for_isotropic_splat(rng):
    cam = make_camera()
    base = project_splat(cam, iso_splat(4.0, sigma=0.25))
    for _ in range(10):
        q = quat_normalize(rng.normal(size=4))
        rot = project_splat(cam, iso_splat(4.0, sigma=0.25, q=q))
        assert np.allclose(rot.cov2d, base.cov2d, atol=1e-9)


def test_cov2d_eigenvalues_at_least_dilation(rng):
    cam = make_camera()
    batch = project_set(cam, random_scene(rng, 50))
    for c in batch.cov2d:
        ev = np.linalg.eigvalsh(c)
        assert np.all(ev >= 0.3 - 1e-12)
        assert np.allclose(c, c.T)


def test_depth_order_stable_ties(rng):
    scene = random_scene(rng, 6)
    scene.positions[:, 2] = 5.0  # all at the same depth
    batch = project_set(make_camera(), scene)
    assert np.array_equal(batch.source_index[batch.order],
                          np.sort(batch.source_index))
