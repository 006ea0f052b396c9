"""Procedural starter assets: a small catalog of splat and mesh classes.

Geometry is deliberately simple (sampled cones, boxes, blobs) but real: splat
classes are genuine gaussian sets rendered by the splat pipeline, mesh
classes are closed OBJ meshes rasterized by the hybrid renderer.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..splats import SplatSet, save_splats
from ..splats.sh import C0
from ..recon.mesh import TriangleMesh, save_mesh_obj

_SEED = 20240501


def _splats_from_points(points, colors, scale=0.02, opacity=0.85) -> SplatSet:
    n = len(points)
    coeffs = (np.asarray(colors, dtype=np.float64) - 0.5) / C0
    return SplatSet(
        positions=points,
        orientations=np.tile([1.0, 0.0, 0.0, 0.0], (n, 1)),
        scales=np.full((n, 3), scale),
        opacities=np.full(n, opacity),
        sh_coeffs=coeffs[:, :, None],
        sh_degree=0,
    )


def make_traffic_cone_splats(n=400) -> SplatSet:
    rng = np.random.default_rng(_SEED)
    h = rng.uniform(0, 0.5, size=n)
    r = 0.16 * (1 - h / 0.5) + 0.01
    theta = rng.uniform(0, 2 * np.pi, size=n)
    pts = np.column_stack([r * np.cos(theta), r * np.sin(theta), h])
    stripe = (h > 0.2) & (h < 0.32)
    colors = np.where(stripe[:, None], [0.95, 0.95, 0.95], [0.95, 0.35, 0.05])
    return _splats_from_points(pts, colors)


def make_passenger_car_splats(n=900) -> SplatSet:
    rng = np.random.default_rng(_SEED + 1)
    body = rng.uniform([-2.0, -0.9, 0.0], [2.0, 0.9, 0.7], size=(n * 2 // 3, 3))
    cabin = rng.uniform([-1.0, -0.8, 0.7], [0.8, 0.8, 1.3], size=(n - len(body), 3))
    pts = np.vstack([body, cabin])
    colors = np.vstack([np.tile([0.15, 0.25, 0.6], (len(body), 1)),
                        np.tile([0.55, 0.65, 0.75], (len(cabin), 1))])
    return _splats_from_points(pts, colors, scale=0.06)


def make_pedestrian_sign_splats(n=350) -> SplatSet:
    rng = np.random.default_rng(_SEED + 2)
    n_pole = n // 3
    pole = np.column_stack([rng.normal(0, 0.01, n_pole),
                            rng.normal(0, 0.01, n_pole),
                            rng.uniform(0, 1.8, n_pole)])
    n_panel = n - n_pole
    uv = rng.uniform(-0.3, 0.3, size=(n_panel, 2))
    keep = np.abs(uv[:, 0]) + np.abs(uv[:, 1]) < 0.3  # diamond plate
    uv = uv[keep]
    panel = np.column_stack([uv[:, 0], np.full(len(uv), 0.01), uv[:, 1] + 2.1])
    pts = np.vstack([pole, panel])
    colors = np.vstack([np.tile([0.4, 0.4, 0.42], (n_pole, 1)),
                        np.tile([0.95, 0.8, 0.1], (len(panel), 1))])
    return _splats_from_points(pts, colors, scale=0.025)


def box_mesh(size, center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    sx, sy, sz = np.asarray(size, dtype=np.float64) / 2.0
    cx, cy, cz = center
    v = np.array([[x, y, z] for x in (-sx, sx) for y in (-sy, sy) for z in (-sz, sz)])
    v += (cx, cy, cz)
    # outward-oriented faces of the 2x2x2 vertex lattice
    f = [
        (0, 1, 3), (0, 3, 2), (4, 6, 7), (4, 7, 5),  # x- x+
        (0, 4, 5), (0, 5, 1), (2, 3, 7), (2, 7, 6),  # y- y+
        (0, 2, 6), (0, 6, 4), (1, 5, 7), (1, 7, 3),  # z- z+
    ]
    return TriangleMesh(v, np.array(f))


def _merge(meshes: list[TriangleMesh]) -> TriangleMesh:
    verts, tris, base = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + base)
        base += len(m.vertices)
    return TriangleMesh(np.vstack(verts), np.vstack(tris))


def make_road_barrier_mesh() -> TriangleMesh:
    return box_mesh([1.5, 0.4, 0.8], center=[0, 0, 0.4])


def make_cement_rubble_mesh() -> TriangleMesh:
    rng = np.random.default_rng(_SEED + 3)
    pieces = []
    for _ in range(5):
        size = rng.uniform(0.25, 0.7, size=3)
        center = rng.uniform(-0.4, 0.4, size=3)
        center[2] = size[2] / 2 * rng.uniform(0.4, 1.0)
        pieces.append(box_mesh(size, center))
    return _merge(pieces)


def make_pedestrian_mesh() -> TriangleMesh:
    body = box_mesh([0.45, 0.3, 1.1], center=[0, 0, 0.85])
    head = box_mesh([0.25, 0.25, 0.25], center=[0, 0, 1.55])
    legs = box_mesh([0.35, 0.25, 0.3], center=[0, 0, 0.15])
    return _merge([body, head, legs])


def make_robot_mesh() -> TriangleMesh:
    chassis = box_mesh([0.7, 0.45, 0.2], center=[0, 0, 0.22])
    wheels = [box_mesh([0.16, 0.06, 0.16], center=[x, y, 0.08])
              for x in (-0.25, 0.25) for y in (-0.26, 0.26)]
    return _merge([chassis] + wheels)


CLASS_BUILDERS = {
    "traffic_cone": ("splat", make_traffic_cone_splats,
                     {"tags": ["cone", "pylon", "marker"], "default_scale": 1.0}),
    "passenger_car": ("splat", make_passenger_car_splats,
                      {"tags": ["car", "vehicle", "sedan"], "default_scale": 1.0}),
    "pedestrian_sign": ("splat", make_pedestrian_sign_splats,
                        {"tags": ["sign", "crossing sign", "signage"],
                         "default_scale": 1.0}),
    "road_barrier": ("mesh", make_road_barrier_mesh,
                     {"tags": ["barrier", "barricade", "guard"],
                      "default_scale": 1.0}),
    "cement_rubble": ("mesh", make_cement_rubble_mesh,
                      {"tags": ["rubble", "debris", "concrete"],
                       "default_scale": 1.0}),
    "pedestrian": ("mesh", make_pedestrian_mesh,
                   {"tags": ["person", "walker", "human"], "default_scale": 1.0}),
    "ackermann_robot": ("mesh", make_robot_mesh,
                        {"tags": ["robot", "rover", "ackermann"],
                         "default_scale": 1.0}),
}

DEFAULT_ANCHORS = {"jtekt_entrance": [8.0, 5.0, 0.0]}


def build_default_assets(root: Path) -> tuple[Path, Path]:
    """Write assets, catalog.json, and scene.json under root; returns
    (catalog_path, scene_path)."""
    root = Path(root)
    asset_dir = root / "assets"
    asset_dir.mkdir(parents=True, exist_ok=True)
    classes = {}
    for name, (kind, builder, meta) in CLASS_BUILDERS.items():
        if kind == "splat":
            rel = f"assets/{name}.ply"
            save_splats(root / rel, builder())
        else:
            rel = f"assets/{name}.obj"
            save_mesh_obj(root / rel, builder())
        classes[name] = {
            "representation": {"kind": kind, "path": rel},
            "default_scale": meta["default_scale"],
            "tags": meta["tags"],
        }
    catalog_path = root / "catalog.json"
    catalog_path.write_text(json.dumps(
        {"classes": classes, "anchors": DEFAULT_ANCHORS}, indent=2) + "\n")

    scene_path = root / "scene.json"
    scene_path.write_text(json.dumps({
        "assets": [],
        "environment": {"time_of_day": 12.0, "weather": "clear", "intensity": 0.0},
        "anchors": DEFAULT_ANCHORS,
        "catalog_ref": "catalog.json",
    }, indent=2) + "\n")
    return catalog_path, scene_path
