import numpy as np

from desktwin.geometry import RigidTransform
from desktwin.splats import SplatGaussian, SplatSet, render_reference, render_tiled, transform_set
from desktwin.splats.sh import C0
from conftest import make_camera, random_scene, random_transform


def solid_color_splat(position, color, opacity, sigma=0.5):
    coeffs = (np.asarray(color, dtype=float).reshape(3, 1) - 0.5) / C0
    return SplatGaussian(opacity=opacity, position=position,
                         orientation=[1, 0, 0, 0], scale=[sigma] * 3,
                         sh_coeffs=coeffs)


def center_camera(width=64, height=64, fx=80.0):
    # integer principal point so on-axis splats land exactly on a pixel center
    return make_camera(width=width, height=height, fx=fx,
                       fov_center=(width // 2, height // 2))


def test_empty_set_renders_black():
    cam = make_camera()
    img = render_reference(cam, SplatSet.empty())
    assert np.array_equal(img.pixels, np.zeros((cam.height, cam.width, 3)))


def test_two_splat_hand_computed_compositing():
    cam = center_camera()
    front = solid_color_splat([0, 0, 5.0], (1, 0, 0), opacity=0.5)
    back = solid_color_splat([0, 0, 6.0], (0, 1, 0), opacity=0.8)
    img = render_reference(cam, SplatSet.from_splats([front, back]))
    px = img.pixels[cam.height // 2, cam.width // 2]
    assert np.allclose(px, [0.5, 0.4, 0.0], atol=1e-6)


def test_single_opaque_splat_hits_its_color():
    cam = center_camera()
    g = solid_color_splat([0, 0, 4.0], (0.2, 0.6, 0.9), opacity=0.99, sigma=1.0)
    img = render_reference(cam, SplatSet.from_splats([g]))
    px = img.pixels[cam.height // 2, cam.width // 2]
    assert np.allclose(px, 0.99 * np.array([0.2, 0.6, 0.9]), atol=1e-9)


def test_equal_depth_composites_in_insertion_order():
    cam = center_camera()
    a = solid_color_splat([0, 0, 5.0], (1, 0, 0), opacity=0.5)
    b = solid_color_splat([0, 0, 5.0], (0, 1, 0), opacity=0.5)
    px_ab = render_reference(cam, SplatSet.from_splats([a, b])) \
        .pixels[cam.height // 2, cam.width // 2]
    px_ba = render_reference(cam, SplatSet.from_splats([b, a])) \
        .pixels[cam.height // 2, cam.width // 2]
    assert np.allclose(px_ab, [0.5, 0.25, 0.0], atol=1e-9)
    assert np.allclose(px_ba, [0.25, 0.5, 0.0], atol=1e-9)


def test_output_in_unit_range(rng):
    cam = make_camera()
    img = render_reference(cam, random_scene(rng, 40))
    assert img.pixels.min() >= 0.0 and img.pixels.max() <= 1.0


def test_render_is_bit_reproducible(rng):
    cam = make_camera()
    scene = random_scene(rng, 30)
    a = render_reference(cam, scene).pixels
    b = render_reference(cam, scene).pixels
    assert np.array_equal(a, b)


def test_tile_equal_to_image_size_matches_reference_exactly(rng):
    cam = make_camera()
    scene = random_scene(rng, 25)
    ref = render_reference(cam, scene).pixels
    one_tile = render_tiled(cam, scene, tile=max(cam.width, cam.height)).pixels
    assert np.array_equal(ref, one_tile)


def test_tiled_matches_reference_on_random_scenes(rng):
    cam = make_camera()
    for _ in range(5):
        scene = random_scene(rng, 35)
        ref = render_reference(cam, scene).pixels
        tiled = render_tiled(cam, scene, tile=16).pixels
        assert np.max(np.abs(ref - tiled)) < 1e-5


def test_tiled_independent_of_scheduling(rng):
    cam = make_camera()
    scene = random_scene(rng, 30)
    serial = render_tiled(cam, scene, tile=16, workers=1).pixels
    parallel = render_tiled(cam, scene, tile=16, workers=4).pixels
    assert np.array_equal(serial, parallel)


def test_world_transform_of_scene_and_camera_is_invisible(rng):
    # view-independent color: coefficients do not rotate with the world
    cam = make_camera()
    scene = random_scene(rng, 20, sh_degree=0)
    base = render_reference(cam, scene).pixels
    for _ in range(3):
        T = random_transform(rng)
        moved_scene = transform_set(T, scene)
        moved_cam = make_camera(
            world_to_camera=cam.world_to_camera.compose(T.inverse()))
        moved = render_reference(moved_cam, moved_scene).pixels
        assert np.max(np.abs(moved - base)) < 1e-5
