import numpy as np
import pytest

from desktwin.optim import photometric_loss, render_with_gradients
from desktwin.splats import ImageBuffer, SplatSet, render_reference
from conftest import make_camera, random_scene
from gradcheck import (analytic_gradient_packed, fd_safe_scene,
                       max_relative_error, numeric_gradient)


def checker(w=16, h=16, invert=False):
    yy, xx = np.mgrid[0:h, 0:w]
    pattern = ((xx + yy) % 2).astype(float)
    if invert:
        pattern = 1.0 - pattern
    return ImageBuffer(np.repeat(pattern[:, :, None], 3, axis=2))


def test_photometric_loss_basics(rng):
    img = ImageBuffer(rng.uniform(0, 1, size=(8, 8, 3)))
    assert photometric_loss(img, img) == 0.0
    zeros = ImageBuffer(np.zeros((8, 8, 3)))
    ones = ImageBuffer(np.ones((8, 8, 3)))
    assert photometric_loss(zeros, ones) == 1.0
    assert photometric_loss(checker(), checker(invert=True)) == 1.0
    with pytest.raises(ValueError):
        photometric_loss(zeros, ImageBuffer(np.zeros((8, 9, 3))))


def test_loss_matches_reference_render(rng):
    cam = make_camera(width=32, height=32, fx=40.0)
    scene = random_scene(rng, 5)
    target = ImageBuffer(rng.uniform(0, 1, size=(32, 32, 3)))
    loss, _ = render_with_gradients(cam, scene, target)
    direct = photometric_loss(render_reference(cam, scene), target)
    assert abs(loss - direct) < 1e-14


def test_exact_match_gives_zero_everything(rng):
    cam = make_camera(width=32, height=32, fx=40.0)
    scene = random_scene(rng, 4)
    target = render_reference(cam, scene)
    loss, grads = render_with_gradients(cam, scene, target)
    assert loss == 0.0
    assert not np.any(grads.position)
    assert not np.any(grads.log_scale)
    assert not np.any(grads.orientation)
    assert not np.any(grads.opacity_logit)
    assert not np.any(grads.sh)


def test_culled_splat_has_zero_gradients(rng):
    cam = make_camera(width=32, height=32, fx=40.0)
    scene = random_scene(rng, 3)
    scene.positions[1] = [0.0, 0.0, -5.0]  # behind the camera
    target = ImageBuffer(rng.uniform(0, 1, size=(32, 32, 3)))
    _, grads = render_with_gradients(cam, scene, target)
    assert not np.any(grads.position[1])
    assert not np.any(grads.log_scale[1])
    assert not np.any(grads.orientation[1])
    assert grads.opacity_logit[1] == 0.0
    assert not np.any(grads.sh[1])
    assert np.any(grads.position[0]) or np.any(grads.position[2])


@pytest.mark.parametrize("seed", range(6))
def test_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(1000 + seed)
    cam = make_camera(width=32, height=32, fx=40.0)
    scene = fd_safe_scene(rng, cam, 5)
    target = render_reference(cam, random_scene(rng, 5))
    _, analytic = analytic_gradient_packed(scene, cam, target)
    numeric = numeric_gradient(scene, cam, target, h=1e-4)
    assert max_relative_error(analytic, numeric) < 1e-4


def test_degree_three_gradients_match(rng):
    cam = make_camera(width=24, height=24, fx=30.0)
    scene = fd_safe_scene(rng, cam, 3, sh_degree=3)
    target = render_reference(cam, random_scene(rng, 3, sh_degree=3))
    _, analytic = analytic_gradient_packed(scene, cam, target)
    numeric = numeric_gradient(scene, cam, target, h=1e-4)
    assert max_relative_error(analytic, numeric) < 1e-4
