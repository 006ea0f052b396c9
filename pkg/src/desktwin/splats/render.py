"""Front-to-back alpha compositing of projected gaussians.

Two paths share one contract: `render_reference` evaluates every retained
splat against the full pixel grid (the obviously-correct, O(splats x pixels)
path), while `render_tiled` bins splats to tiles by their 3-sigma boxes and
only touches covered tiles. Per pixel both composite identical contribution
sequences, so they agree to floating-point reproduction.

Compositing per pixel p: alpha_i = o_i * exp(-0.5 d^T inv(cov2d) d) with
d = p - mean2d, taken as zero outside the splat's 3-sigma box;
contributions with alpha < 1/255 are skipped; C = sum_i c_i alpha_i T_i with
T_i the product of (1 - alpha_j) over already-composited splats.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .project import ProjectedBatch, project_set
from .types import ImageBuffer, PinholeCamera, SplatSet

ALPHA_CUTOFF = 1.0 / 255.0
DEFAULT_TILE = 16


def gaussian_footprint(batch: ProjectedBatch, m: int,
                       xs: np.ndarray, ys: np.ndarray):
    """Alpha of splat m over a pixel grid, zeroed outside its 3-sigma box and
    below the cutoff. Returns (alpha, gauss, hit, dx, dy); both renderers and
    the gradient pass share this kernel so their pixels match bit for bit."""
    dx = xs - batch.mean2d[m, 0]          # (w,)
    dy = ys - batch.mean2d[m, 1]          # (h,)
    ex, ey = batch.extent3[m]
    support = (np.abs(dy)[:, None] <= ey) & (np.abs(dx)[None, :] <= ex)
    a, b, c = (batch.inv_cov2d[m, 0, 0], batch.inv_cov2d[m, 0, 1],
               batch.inv_cov2d[m, 1, 1])
    quad = np.outer(dy, (-b) * dx)
    quad -= (0.5 * a) * (dx * dx)[None, :]
    quad -= (0.5 * c) * (dy * dy)[:, None]
    gauss = np.exp(quad, out=quad)        # exp(-0.5 d^T A d)
    alpha = gauss * batch.opacity[m]
    alpha[~support] = 0.0
    hit = alpha >= ALPHA_CUTOFF
    alpha[~hit] = 0.0
    return alpha, gauss, hit, dx, dy


def _composite_region(batch: ProjectedBatch, members: np.ndarray,
                      x0: int, y0: int, color: np.ndarray, transmit: np.ndarray):
    """Composite `members` (already depth-ordered) into a region buffer.

    color is (h, w, 3) and transmit (h, w) for the region whose top-left pixel
    center is (x0, y0); both are updated in place.
    """
    h, w = transmit.shape
    xs = np.arange(x0, x0 + w, dtype=np.float64)
    ys = np.arange(y0, y0 + h, dtype=np.float64)
    for m in members:
        alpha, _, hit, _, _ = gaussian_footprint(batch, m, xs, ys)
        if not hit.any():
            continue
        weight = alpha * transmit
        color += weight[:, :, None] * batch.color[m]
        transmit *= 1.0 - alpha


def render_reference(cam: PinholeCamera, splat_set: SplatSet) -> ImageBuffer:
    """Reference renderer: every splat's gaussian is evaluated densely at
    every pixel of the frame (no spatial structure), the O(splats x pixels)
    baseline the tiled path is measured against. Compositing happens on the
    3-sigma box because alpha is identically zero beyond it."""
    batch = project_set(cam, splat_set)
    h, w = cam.height, cam.width
    color = np.zeros((h, w, 3))
    transmit = np.ones((h, w))
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    for m in batch.order:
        dx = xs - batch.mean2d[m, 0]
        dy = ys - batch.mean2d[m, 1]
        a, b, c = (batch.inv_cov2d[m, 0, 0], batch.inv_cov2d[m, 0, 1],
                   batch.inv_cov2d[m, 1, 1])
        quad = np.outer(dy, (-b) * dx)                 # dense, full frame
        quad -= (0.5 * a) * (dx * dx)[None, :]
        quad -= (0.5 * c) * (dy * dy)[:, None]
        gauss = np.exp(quad, out=quad)
        alpha_full = gauss
        alpha_full *= batch.opacity[m]
        ex, ey = batch.extent3[m]
        mx, my = batch.mean2d[m]
        x0 = max(int(np.ceil(mx - ex)), 0)
        x1 = min(int(np.floor(mx + ex)), w - 1)
        y0 = max(int(np.ceil(my - ey)), 0)
        y1 = min(int(np.floor(my + ey)), h - 1)
        if x0 > x1 or y0 > y1:
            continue
        box = (slice(y0, y1 + 1), slice(x0, x1 + 1))
        alpha = alpha_full[box]                        # support holds inside
        alpha[alpha < ALPHA_CUTOFF] = 0.0
        weight = alpha * transmit[box]
        color[box] += weight[:, :, None] * batch.color[m]
        transmit[box] *= 1.0 - alpha
    return ImageBuffer(np.clip(color, 0.0, 1.0))


def render_tiled(cam: PinholeCamera, splat_set: SplatSet,
                 tile: int = DEFAULT_TILE, workers: int = 1) -> ImageBuffer:
    """Tiled renderer: splats binned to tiles by 3-sigma extent.

    Tiles are independent; with workers > 1 they are evaluated on a thread
    pool. Output is identical regardless of scheduling because each tile owns
    a disjoint image region.
    """
    if tile < 1:
        raise ValueError("tile size must be >= 1")
    batch = project_set(cam, splat_set)
    ntx = (cam.width + tile - 1) // tile
    nty = (cam.height + tile - 1) // tile
    bins: list[list[int]] = [[] for _ in range(ntx * nty)]
    for m in batch.order:  # depth order, so per-tile lists inherit it
        ex, ey = batch.extent3[m]
        mx, my = batch.mean2d[m]
        tx0 = max(int(np.floor((mx - ex) / tile)), 0)
        tx1 = min(int(np.floor((mx + ex) / tile)), ntx - 1)
        ty0 = max(int(np.floor((my - ey) / tile)), 0)
        ty1 = min(int(np.floor((my + ey) / tile)), nty - 1)
        for ty in range(ty0, ty1 + 1):
            for tx in range(tx0, tx1 + 1):
                bins[ty * ntx + tx].append(m)

    color = np.zeros((cam.height, cam.width, 3))
    transmit = np.ones((cam.height, cam.width))

    def run_tile(t: int):
        members = bins[t]
        if not members:
            return
        ty, tx = divmod(t, ntx)
        x0, y0 = tx * tile, ty * tile
        x1, y1 = min(x0 + tile, cam.width), min(y0 + tile, cam.height)
        _composite_region(batch, np.array(members), x0, y0,
                          color[y0:y1, x0:x1], transmit[y0:y1, x0:x1])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_tile, range(len(bins))))
    else:
        for t in range(len(bins)):
            run_tile(t)
    return ImageBuffer(np.clip(color, 0.0, 1.0))
