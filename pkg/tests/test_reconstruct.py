import numpy as np
import pytest
from scipy.spatial import cKDTree

from desktwin.geometry import RigidTransform, random_rotation
from desktwin.recon import OrientedPointCloud, reconstruct


def sphere_cloud(rng, n=2000):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return OrientedPointCloud(points=v, normals=v)


def cube_cloud(rng, per_face=700):
    pts, nrm = [], []
    for axis in range(3):
        for side in (0.0, 1.0):
            uv = rng.uniform(0, 1, size=(per_face, 2))
            p = np.zeros((per_face, 3))
            p[:, axis] = side
            other = [a for a in range(3) if a != axis]
            p[:, other[0]] = uv[:, 0]
            p[:, other[1]] = uv[:, 1]
            n = np.zeros((per_face, 3))
            n[:, axis] = 1.0 if side == 1.0 else -1.0
            pts.append(p)
            nrm.append(n)
    return OrientedPointCloud(np.vstack(pts), np.vstack(nrm))


def test_sphere_oracle(rng):
    mesh, report = reconstruct(sphere_cloud(rng), res=(64, 64, 64), tol=1e-6)
    assert report.solver.converged
    assert mesh.is_watertight()
    assert len(mesh.connected_components()) == 1
    radii = np.linalg.norm(mesh.vertices, axis=1)
    assert np.mean(np.abs(radii - 1.0)) < 0.05
    assert np.all(mesh.triangle_areas() > 1e-12)


def test_cube_volume_oracle(rng):
    mesh, _ = reconstruct(cube_cloud(rng), res=(64, 64, 64), tol=1e-6)
    assert abs(abs(mesh.signed_volume()) - 1.0) < 0.15


def test_flipping_normals_preserves_geometry(rng):
    cloud = sphere_cloud(rng)
    m1, r1 = reconstruct(cloud, res=(48, 48, 48))
    m2, r2 = reconstruct(cloud.flipped(), res=(48, 48, 48))
    # indicator negates, surface stays, orientation reverses
    assert abs(r1.isovalue + r2.isovalue) < 1e-4
    assert np.sign(m1.signed_volume()) == -np.sign(m2.signed_volume())
    d = max(cKDTree(m2.vertices).query(m1.vertices)[0].max(),
            cKDTree(m1.vertices).query(m2.vertices)[0].max())
    cell_diag = np.linalg.norm((m1.vertices.max(0) - m1.vertices.min(0)) / 47)
    assert d <= cell_diag


def test_rigid_motion_equivariance(rng):
    cloud = sphere_cloud(rng, n=1500)
    base, _ = reconstruct(cloud, res=(48, 48, 48))
    T = RigidTransform(random_rotation(rng), rng.uniform(-3, 3, size=3))
    moved = OrientedPointCloud(T.apply(cloud.points),
                               cloud.normals @ T.rotation.T)
    remesh, _ = reconstruct(moved, res=(48, 48, 48))
    expected = T.apply(base.vertices)
    d = max(cKDTree(expected).query(remesh.vertices)[0].max(),
            cKDTree(remesh.vertices).query(expected)[0].max())
    cell_diag = np.linalg.norm(2.8 / 47 * np.ones(3))
    assert d <= cell_diag


def test_empty_cloud_rejected():
    with pytest.raises(ValueError):
        reconstruct(OrientedPointCloud(np.zeros((0, 3)), np.zeros((0, 3))))
