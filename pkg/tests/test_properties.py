"""Property tests over the algebraic invariants."""
import numpy as np
from hypothesis import given, settings, strategies as st

from desktwin.geometry import RigidTransform, quat_to_matrix
from desktwin.metrics import psnr, ssim
from desktwin.splats import SplatSet, transform_set
from desktwin.splats.types import ImageBuffer

finite = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)


def quat_strategy():
    return st.tuples(finite, finite, finite, finite).filter(
        lambda q: np.linalg.norm(q) > 1e-3)


def transform_strategy():
    return st.tuples(quat_strategy(), st.tuples(finite, finite, finite)).map(
        lambda qt: RigidTransform(quat_to_matrix(np.array(qt[0])),
                                  np.array(qt[1])))


def one_splat_set(position, q):
    qn = np.array(q) / np.linalg.norm(q)
    return SplatSet(positions=[position], orientations=[qn],
                    scales=[[0.2, 0.3, 0.4]], opacities=[0.5],
                    sh_coeffs=np.zeros((1, 3, 1)), sh_degree=0)


@settings(max_examples=50, deadline=None)
@given(transform_strategy(), transform_strategy(),
       st.tuples(finite, finite, finite), quat_strategy())
def test_transform_composition(T1, T2, position, q):
    scene = one_splat_set(position, q)
    two = transform_set(T2, transform_set(T1, scene))
    one = transform_set(T2.compose(T1), scene)
    assert np.allclose(two.positions, one.positions, atol=1e-9)
    assert np.allclose(quat_to_matrix(two.orientations[0]),
                       quat_to_matrix(one.orientations[0]), atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(transform_strategy(), st.tuples(finite, finite, finite), quat_strategy())
def test_transform_inverse_round_trip(T, position, q):
    scene = one_splat_set(position, q)
    back = transform_set(T.inverse(), transform_set(T, scene))
    assert np.allclose(back.positions, scene.positions, atol=1e-9)
    assert abs(np.linalg.norm(back.orientations[0]) - 1.0) < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_metric_symmetry(seed):
    rng = np.random.default_rng(seed)
    x = ImageBuffer(rng.uniform(0, 1, size=(16, 16, 3)))
    y = ImageBuffer(rng.uniform(0, 1, size=(16, 16, 3)))
    assert abs(psnr(x, y) - psnr(y, x)) < 1e-12
    assert abs(ssim(x, y) - ssim(y, x)) < 1e-9
    assert -1.0 <= ssim(x, y) <= 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1),
       st.floats(1e-6, 1e12, allow_nan=False, allow_infinity=False))
def test_any_finite_step_preserves_parameter_ranges(seed, lr):
    from desktwin.optim import FitConfig, fit_splats
    from conftest import make_camera, random_scene

    rng = np.random.default_rng(seed)
    cam = make_camera(width=16, height=16, fx=20.0)
    scene = random_scene(rng, 2)
    target = ImageBuffer(rng.uniform(0, 1, size=(16, 16, 3)))
    cfg = FitConfig(iterations=1, lr_position=lr, lr_log_scale=lr,
                    lr_orientation=lr, lr_opacity_logit=lr, lr_sh=lr)
    fitted, _ = fit_splats(scene, [(cam, target)], cfg)
    assert np.all(fitted.opacities > 0) and np.all(fitted.opacities < 1)
    assert np.all(fitted.scales > 0)
    assert np.allclose(np.linalg.norm(fitted.orientations, axis=1), 1.0,
                       atol=1e-9)
