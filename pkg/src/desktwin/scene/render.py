"""Hybrid scene rendering: splat assets composited over rasterized meshes,
followed by environment post-processing.

Meshes render through a flat-shaded z-buffer rasterizer; splats composite
front to back but are occluded per pixel wherever their center depth lies
beyond the mesh surface, and the mesh color enters with the remaining
transmittance. Weather and time of day apply after compositing: a global
illumination scale from sun elevation, exponential depth fog toward gray,
and a deterministic precipitation overlay whose density follows intensity.
"""
from __future__ import annotations

import hashlib

import numpy as np

from ..cameras import orbit_camera
from ..geometry import RigidTransform
from ..recon.mesh import TriangleMesh, load_mesh_obj
from ..splats import SplatSet, load_splats
from ..splats.project import project_set
from ..splats.render import ALPHA_CUTOFF
from ..splats.types import ImageBuffer, PinholeCamera
from .behaviors import animated_pose
from .environment import EnvironmentState, illumination_scale, sun_direction
from .graph import SceneAsset, SceneGraph

FOG_DENSITY = 0.05          # per meter at intensity 1
FOG_GRAY = 0.65
MESH_AMBIENT = 0.35
CLASS_COLORS = {
    "road_barrier": (0.9, 0.45, 0.1),
    "cement_rubble": (0.55, 0.53, 0.5),
    "pedestrian": (0.2, 0.4, 0.7),
    "ackermann_robot": (0.75, 0.15, 0.15),
}
DEFAULT_MESH_COLOR = (0.6, 0.6, 0.6)


class AssetLibrary:
    """Loads and caches splat sets and meshes by source path."""

    def __init__(self):
        self._splats: dict[str, SplatSet] = {}
        self._meshes: dict[str, TriangleMesh] = {}

    def splats(self, path: str) -> SplatSet:
        if path not in self._splats:
            self._splats[path] = load_splats(path)
        return self._splats[path]

    def mesh(self, path: str) -> TriangleMesh:
        if path not in self._meshes:
            self._meshes[path] = load_mesh_obj(path)
        return self._meshes[path]


def _posed_splats(base: SplatSet, pose: RigidTransform, scale: float) -> SplatSet:
    positions = (base.positions * scale) @ pose.rotation.T + pose.translation
    out = base.copy()
    out.positions = positions
    out.scales = base.scales * scale
    # rotate orientations through the pose
    from ..splats.transform import transform_set
    rotated = transform_set(RigidTransform(pose.rotation, np.zeros(3)), base)
    out.orientations = rotated.orientations
    return out


def _mesh_color(asset: SceneAsset) -> np.ndarray:
    hexval = asset.properties.get("color")
    if isinstance(hexval, str) and hexval.startswith("#") and len(hexval) == 7:
        return np.array([int(hexval[i:i + 2], 16) / 255.0 for i in (1, 3, 5)])
    return np.array(CLASS_COLORS.get(asset.class_name, DEFAULT_MESH_COLOR))


def _rasterize_meshes(cam: PinholeCamera, items: list[tuple[TriangleMesh, np.ndarray]],
                      sun: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flat-shaded z-buffer pass; returns (color (h,w,3), depth (h,w))."""
    h, w = cam.height, cam.width
    color = np.zeros((h, w, 3))
    depth = np.full((h, w), np.inf)
    W = cam.world_to_camera.rotation
    t = cam.world_to_camera.translation
    for mesh, base_color in items:
        if len(mesh.triangles) == 0:
            continue
        v_cam = mesh.vertices @ W.T + t
        tri = mesh.triangles
        a, b, c = v_cam[tri[:, 0]], v_cam[tri[:, 1]], v_cam[tri[:, 2]]
        # world normals for shading
        wa = mesh.vertices[tri[:, 0]]
        n_world = np.cross(mesh.vertices[tri[:, 1]] - wa,
                           mesh.vertices[tri[:, 2]] - wa)
        lens = np.linalg.norm(n_world, axis=1)
        ok = (a[:, 2] > cam.near) & (b[:, 2] > cam.near) & (c[:, 2] > cam.near) \
            & (lens > 1e-12)
        shade = MESH_AMBIENT + (1 - MESH_AMBIENT) * np.abs(
            (n_world / np.maximum(lens, 1e-12)[:, None]) @ sun)
        for k in np.nonzero(ok)[0]:
            pts = np.stack([a[k], b[k], c[k]])
            sx = cam.fx * pts[:, 0] / pts[:, 2] + cam.cx
            sy = cam.fy * pts[:, 1] / pts[:, 2] + cam.cy
            x0 = max(int(np.ceil(sx.min())), 0)
            x1 = min(int(np.floor(sx.max())), w - 1)
            y0 = max(int(np.ceil(sy.min())), 0)
            y1 = min(int(np.floor(sy.max())), h - 1)
            if x0 > x1 or y0 > y1:
                continue
            xs = np.arange(x0, x1 + 1)
            ys = np.arange(y0, y1 + 1)
            px, py = np.meshgrid(xs, ys)
            d = np.array([sx[1] - sx[0], sy[1] - sy[0],
                          sx[2] - sx[0], sy[2] - sy[0]])
            det = d[0] * d[3] - d[2] * d[1]
            if abs(det) < 1e-12:
                continue
            rx = px - sx[0]
            ry = py - sy[0]
            u = (rx * d[3] - ry * d[2]) / det
            vq = (ry * d[0] - rx * d[1]) / det
            mask = (u >= 0) & (vq >= 0) & (u + vq <= 1)
            if not mask.any():
                continue
            inv_z = (1 - u - vq) / pts[0, 2] + u / pts[1, 2] + vq / pts[2, 2]
            z = 1.0 / inv_z  # perspective-correct interpolated depth
            region = (slice(y0, y1 + 1), slice(x0, x1 + 1))
            closer = mask & (z < depth[region])
            depth[region][closer] = z[closer]
            patch = color[region]
            patch[closer] = base_color * shade[k]
            color[region] = patch
    return color, depth


def _composite_over(cam: PinholeCamera, splats: SplatSet,
                    bg_color: np.ndarray, bg_depth: np.ndarray
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Depth-aware front-to-back compositing over a background; returns
    (color, expected depth)."""
    h, w = cam.height, cam.width
    color = np.zeros((h, w, 3))
    depth_acc = np.zeros((h, w))
    transmit = np.ones((h, w))
    batch = project_set(cam, splats)
    for m in batch.order:
        mx, my = batch.mean2d[m]
        ex, ey = batch.extent3[m]
        x0, x1 = max(int(np.ceil(mx - ex)), 0), min(int(np.floor(mx + ex)), w - 1)
        y0, y1 = max(int(np.ceil(my - ey)), 0), min(int(np.floor(my + ey)), h - 1)
        if x0 > x1 or y0 > y1:
            continue
        box = (slice(y0, y1 + 1), slice(x0, x1 + 1))
        dx = np.arange(x0, x1 + 1) - mx
        dy = np.arange(y0, y1 + 1) - my
        A = batch.inv_cov2d[m]
        quad = (A[0, 0] * dx * dx)[None, :] + (A[1, 1] * dy * dy)[:, None] \
            + (2 * A[0, 1]) * np.outer(dy, dx)
        alpha = batch.opacity[m] * np.exp(-0.5 * quad)
        hit = (alpha >= ALPHA_CUTOFF) & (batch.depth[m] < bg_depth[box])
        if not hit.any():
            continue
        weight = np.where(hit, alpha * transmit[box], 0.0)
        color[box] += weight[:, :, None] * batch.color[m]
        depth_acc[box] += weight * batch.depth[m]
        transmit[box] *= np.where(hit, 1.0 - alpha, 1.0)
    finite_bg = np.isfinite(bg_depth)
    color += transmit[:, :, None] * np.where(finite_bg[:, :, None], bg_color, 0.0)
    far_depth = np.where(finite_bg, bg_depth, cam.far)
    depth = depth_acc + transmit * far_depth
    return color, depth


def _precipitation_overlay(img: np.ndarray, env: EnvironmentState):
    h, w = img.shape[:2]
    digest = hashlib.sha256(
        f"{env.weather}|{env.intensity:.6f}|{w}x{h}".encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    if env.weather == "rain":
        count = int(250 * env.intensity * (w * h) / (320 * 240))
        for _ in range(count):
            x = rng.integers(0, w)
            y = rng.integers(0, max(h - 12, 1))
            length = int(rng.integers(5, 12))
            seg = img[y:y + length, x]
            img[y:y + length, x] = 0.7 * seg + 0.3 * np.array([0.65, 0.68, 0.75])
    elif env.weather == "snow":
        count = int(450 * env.intensity * (w * h) / (320 * 240))
        for _ in range(count):
            x = int(rng.integers(0, w))
            y = int(rng.integers(0, h))
            img[y, x] = 0.25 * img[y, x] + 0.75


def apply_environment(pixels: np.ndarray, depth: np.ndarray,
                      env: EnvironmentState) -> np.ndarray:
    out = pixels * illumination_scale(env)
    if env.weather == "fog" and env.intensity > 0:
        fog = 1.0 - np.exp(-FOG_DENSITY * env.intensity * depth)
        gray = FOG_GRAY * illumination_scale(env)
        out = out * (1 - fog[:, :, None]) + gray * fog[:, :, None]
    if env.weather in ("rain", "snow") and env.intensity > 0:
        _precipitation_overlay(out, env)
    return np.clip(out, 0.0, 1.0)


def default_camera(scene: SceneGraph, width: int = 320, height: int = 240
                   ) -> PinholeCamera:
    lo, hi = scene.bounds()
    center = (lo + hi) / 2.0
    radius = max(float(np.linalg.norm(hi - lo)) / 2.0, 2.0)
    return orbit_camera(center, azimuth_deg=225.0, elevation_deg=35.0,
                        distance=3.0 * radius, width=width, height=height)


def render_scene(scene: SceneGraph, cam: PinholeCamera | None = None,
                 library: AssetLibrary | None = None,
                 time_s: float = 0.0) -> ImageBuffer:
    """Render a snapshot of the scene with environment modifiers applied."""
    cam = cam or default_camera(scene)
    library = library or AssetLibrary()
    env = scene.environment
    mesh_items = []
    splat_parts = []
    for asset in scene.assets:
        pose = animated_pose(asset, time_s)
        # resolve through the catalog: asset.path is catalog-relative
        source = str(scene.catalog.entries[asset.class_name].path)
        if asset.kind == "mesh":
            mesh = library.mesh(source)
            verts = (mesh.vertices * asset.uniform_scale) @ pose.rotation.T \
                + pose.translation
            mesh_items.append((TriangleMesh(verts, mesh.triangles),
                               _mesh_color(asset)))
        else:
            base = library.splats(source)
            splat_parts.append(_posed_splats(base, pose, asset.uniform_scale))
    bg_color, bg_depth = _rasterize_meshes(cam, mesh_items, sun_direction(env))
    combined = _concat_sets(splat_parts)
    color, depth = _composite_over(cam, combined, bg_color, bg_depth)
    return ImageBuffer(apply_environment(color, depth, env))


def _concat_sets(parts: list[SplatSet]) -> SplatSet:
    if not parts:
        return SplatSet.empty()
    degree = max(p.sh_degree for p in parts)
    dim = (degree + 1) ** 2
    coeff_blocks = []
    for p in parts:  # zero-pad lower-degree assets up to the common degree
        block = np.zeros((len(p), 3, dim))
        block[:, :, :p.sh_coeffs.shape[2]] = p.sh_coeffs
        coeff_blocks.append(block)
    return SplatSet(
        positions=np.vstack([p.positions for p in parts]),
        orientations=np.vstack([p.orientations for p in parts]),
        scales=np.vstack([p.scales for p in parts]),
        opacities=np.concatenate([p.opacities for p in parts]),
        sh_coeffs=np.vstack(coeff_blocks),
        sh_degree=degree,
    )
