import numpy as np

from desktwin.geometry import RigidTransform, quat_to_matrix
from desktwin.splats import transform_set
from conftest import random_scene, random_transform


def rotations_of(splat_set):
    return np.stack([quat_to_matrix(q) for q in splat_set.orientations])


def test_identity_transform_is_exact(rng):
    scene = random_scene(rng, 12)
    out = transform_set(RigidTransform.identity(), scene)
    assert np.array_equal(out.positions, scene.positions)
    assert np.allclose(rotations_of(out), rotations_of(scene), atol=1e-12)
    assert np.array_equal(out.opacities, scene.opacities)
    assert np.array_equal(out.scales, scene.scales)
    assert np.array_equal(out.sh_coeffs, scene.sh_coeffs)


def test_pure_translation(rng):
    scene = random_scene(rng, 8)
    t = np.array([1.0, 2.0, 3.0])
    out = transform_set(RigidTransform(np.eye(3), t), scene)
    assert np.allclose(out.positions, scene.positions + t, atol=1e-12)
    assert np.allclose(out.orientations, scene.orientations, atol=1e-12)


def test_untouched_fields_are_bitwise_equal(rng):
    scene = random_scene(rng, 8)
    out = transform_set(random_transform(rng), scene)
    assert np.array_equal(out.opacities, scene.opacities)
    assert np.array_equal(out.scales, scene.scales)
    assert np.array_equal(out.sh_coeffs, scene.sh_coeffs)
    assert np.all(np.abs(np.linalg.norm(out.orientations, axis=1) - 1) < 1e-6)


def test_composition_property_100_random_triples(rng):
    for _ in range(100):
        scene = random_scene(rng, 5)
        T1, T2 = random_transform(rng), random_transform(rng)
        two_step = transform_set(T2, transform_set(T1, scene))
        one_step = transform_set(T2.compose(T1), scene)
        assert np.allclose(two_step.positions, one_step.positions, atol=1e-9)
        # orientations compared by rotation action (quaternion sign is free)
        assert np.allclose(rotations_of(two_step), rotations_of(one_step), atol=1e-9)


def test_order_preserved(rng):
    scene = random_scene(rng, 6)
    out = transform_set(random_transform(rng), scene)
    T = random_transform(rng)
    out = transform_set(T, scene)
    for i in range(6):
        assert np.allclose(out.positions[i], T.apply(scene.positions[i]), atol=1e-12)
