"""Differentiable reference rendering.

Backpropagates the mean-squared photometric loss through alpha compositing,
the perspective projection (including the Jacobian's dependence on the
camera-frame position), and spherical-harmonic color evaluation. The alpha
cutoff, the 3-sigma support box, frustum culling, color clamping, and the
depth sort are treated as non-differentiable gating, so partials are exact
almost everywhere.

Parameters follow the optimizer's coordinates: position (world), log scale,
raw orientation quaternion (gradient lies in the unit-sphere tangent),
opacity logit, and SH coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..splats.render import gaussian_footprint
from ..splats.project import project_set
from ..splats.sh import sh_basis, sh_basis_grad, sh_dim
from ..splats.types import ImageBuffer, PinholeCamera, SplatSet
from ..geometry import quat_rotation_partials


@dataclass
class SplatGradients:
    """Per-splat partials of the photometric loss; zero rows for culled splats."""

    position: np.ndarray       # (N, 3)
    log_scale: np.ndarray      # (N, 3)
    orientation: np.ndarray    # (N, 4), tangent to the unit sphere
    opacity_logit: np.ndarray  # (N,)
    sh: np.ndarray             # (N, 3, (L+1)^2)

    @staticmethod
    def zeros(n: int, degree: int) -> "SplatGradients":
        return SplatGradients(
            position=np.zeros((n, 3)),
            log_scale=np.zeros((n, 3)),
            orientation=np.zeros((n, 4)),
            opacity_logit=np.zeros(n),
            sh=np.zeros((n, 3, sh_dim(degree))),
        )

    def scaled(self, factor: float) -> "SplatGradients":
        return SplatGradients(self.position * factor, self.log_scale * factor,
                              self.orientation * factor,
                              self.opacity_logit * factor, self.sh * factor)

    def add_(self, other: "SplatGradients"):
        self.position += other.position
        self.log_scale += other.log_scale
        self.orientation += other.orientation
        self.opacity_logit += other.opacity_logit
        self.sh += other.sh


def photometric_loss(rendered: ImageBuffer, target: ImageBuffer) -> float:
    """Mean squared per-channel error between two equal-sized images."""
    if not rendered.same_shape(target):
        raise ValueError("rendered and target dimensions differ")
    return float(np.mean((rendered.pixels - target.pixels) ** 2))


class _SplatCache:
    """Forward intermediates for one retained splat."""

    __slots__ = ("index", "x0", "x1", "y0", "y1", "alpha", "gauss",
                 "t_before", "hit", "delta_x", "delta_y", "inv_cov", "mean2d",
                 "color", "raw_rgb", "p_cam", "J", "M", "R", "D_s", "q_unit",
                 "cov3", "basis", "view_dir", "view_norm")

    def __init__(self, **kw):
        for k, v in kw.items():
            setattr(self, k, v)


def _forward(cam: PinholeCamera, splat_set: SplatSet):
    """Composite through project_set so the image matches render_reference
    bit for bit, caching gradient-only intermediates alongside."""
    W = cam.world_to_camera.rotation
    t_wc = cam.world_to_camera.translation
    cam_center = cam.center
    degree = splat_set.sh_degree
    batch = project_set(cam, splat_set)

    caches: list[_SplatCache] = []
    image = np.zeros((cam.height, cam.width, 3))
    transmit = np.ones((cam.height, cam.width))
    for m in batch.order:
        i = int(batch.source_index[m])
        mean2d = batch.mean2d[m]
        ex, ey = batch.extent3[m]
        x0 = max(int(np.ceil(mean2d[0] - ex)), 0)
        x1 = min(int(np.floor(mean2d[0] + ex)), cam.width - 1)
        y0 = max(int(np.ceil(mean2d[1] - ey)), 0)
        y1 = min(int(np.floor(mean2d[1] + ey)), cam.height - 1)
        if x0 > x1 or y0 > y1:
            continue

        # gradient-only intermediates (may differ from the batch path by ulps)
        p_cam = W @ splat_set.positions[i] + t_wc
        x, y, z = p_cam
        q = splat_set.orientations[i]
        q_unit = q / np.linalg.norm(q)
        Rq = _quat_matrix(q_unit)
        s = splat_set.scales[i]
        cov3 = (Rq * s**2) @ Rq.T
        J = np.array([[cam.fx / z, 0.0, -cam.fx * x / z**2],
                      [0.0, cam.fy / z, -cam.fy * y / z**2]])
        d = splat_set.positions[i] - cam_center
        dn = np.linalg.norm(d)
        v = d / dn
        basis = sh_basis(degree, v)
        raw_rgb = splat_set.sh_coeffs[i] @ basis + 0.5

        c = _SplatCache(
            index=i, x0=x0, x1=x1, y0=y0, y1=y1,
            alpha=None, gauss=None, t_before=None, hit=None,
            delta_x=None, delta_y=None, inv_cov=batch.inv_cov2d[m],
            mean2d=mean2d, color=batch.color[m], raw_rgb=raw_rgb,
            p_cam=p_cam, J=J, M=J @ W, R=Rq, D_s=s, q_unit=q_unit,
            cov3=cov3, basis=basis, view_dir=v, view_norm=dn)

        xs = np.arange(c.x0, c.x1 + 1, dtype=np.float64)
        ys = np.arange(c.y0, c.y1 + 1, dtype=np.float64)
        alpha, gauss, hit, dx, dy = gaussian_footprint(batch, m, xs, ys)
        c.delta_x = dx
        c.delta_y = dy
        box = (slice(c.y0, c.y1 + 1), slice(c.x0, c.x1 + 1))
        c.gauss = gauss
        c.alpha = alpha
        c.hit = hit
        c.t_before = transmit[box].copy()
        weight = alpha * c.t_before
        image[box] += weight[:, :, None] * c.color
        transmit[box] *= 1.0 - alpha
        caches.append(c)
    return caches, np.clip(image, 0.0, 1.0)


def _quat_matrix(q_unit: np.ndarray) -> np.ndarray:
    w, x, y, z = q_unit
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def render_with_gradients(cam: PinholeCamera, splat_set: SplatSet,
                          target: ImageBuffer) -> tuple[float, SplatGradients]:
    """Loss and exact analytic partials through the reference render path."""
    if (target.height, target.width) != (cam.height, cam.width):
        raise ValueError("target dimensions do not match the camera")
    caches, image = _forward(cam, splat_set)
    diff = image - target.pixels
    loss = float(np.mean(diff**2))
    dL_dC = (2.0 / diff.size) * diff

    grads = SplatGradients.zeros(len(splat_set), splat_set.sh_degree)
    W = cam.world_to_camera.rotation

    # back-to-front: suffix sums of composited color let each splat see the
    # total contribution of everything behind it
    after = np.zeros((cam.height, cam.width, 3))
    for c in reversed(caches):
        i = c.index
        box = (slice(c.y0, c.y1 + 1), slice(c.x0, c.x1 + 1))
        dC = dL_dC[box]                       # (h, w, 3)
        t_b = c.t_before
        alpha = c.alpha
        hit = c.hit
        weight = alpha * t_b

        # color gradient (through the clamp gate)
        d_color = np.einsum("yxc,yx->c", dC, weight)
        gate = (c.raw_rgb > 0.0) & (c.raw_rgb < 1.0)
        d_raw = d_color * gate

        # alpha gradient: own contribution minus attenuation of what follows
        suffix = after[box]
        one_minus = np.where(hit, 1.0 - alpha, 1.0)
        d_alpha = (np.einsum("yxc,c->yx", dC, c.color) * t_b
                   - np.einsum("yxc,yxc->yx", dC, suffix) / one_minus)
        d_alpha = np.where(hit, d_alpha, 0.0)

        after[box] += weight[:, :, None] * c.color

        o = splat_set.opacities[i]
        d_opacity = float(np.sum(d_alpha * c.gauss))
        grads.opacity_logit[i] = d_opacity * o * (1.0 - o)

        # exponent m = delta^T A delta: dL/dm, then moments over the box
        d_m = -0.5 * (d_alpha * o * c.gauss)
        mx = float(np.sum(d_m * c.delta_x[None, :]))
        my = float(np.sum(d_m * c.delta_y[:, None]))
        e1 = np.array([mx, my])
        exx = float(np.sum(d_m * (c.delta_x**2)[None, :]))
        eyy = float(np.sum(d_m * (c.delta_y**2)[:, None]))
        exy = float(np.sum(d_m * np.outer(c.delta_y, c.delta_x)))
        e2 = np.array([[exx, exy], [exy, eyy]])

        A = c.inv_cov
        d_mean2d = -2.0 * (A @ e1)
        d_cov2 = -(A @ e2 @ A)

        # cov2 = M cov3 M^T + dilation
        d_cov3 = c.M.T @ d_cov2 @ c.M
        d_M = 2.0 * d_cov2 @ c.M @ c.cov3
        d_J = d_M @ W.T

        # camera-frame position: via mean2d (Jacobian) and via J itself
        x, y, z = c.p_cam
        d_pcam = c.J.T @ d_mean2d
        fx, fy = cam.fx, cam.fy
        d_pcam[0] += d_J[0, 2] * (-fx / z**2)
        d_pcam[1] += d_J[1, 2] * (-fy / z**2)
        d_pcam[2] += (d_J[0, 0] * (-fx / z**2) + d_J[1, 1] * (-fy / z**2)
                      + d_J[0, 2] * (2.0 * fx * x / z**3)
                      + d_J[1, 2] * (2.0 * fy * y / z**3))

        # view-direction path into the SH colors
        grad_b = sh_basis_grad(splat_set.sh_degree, c.view_dir)  # (dim, 3)
        d_v = (d_raw[:, None] * splat_set.sh_coeffs[i]).sum(axis=0) @ grad_b
        v = c.view_dir
        d_dir = (d_v - v * float(v @ d_v)) / c.view_norm

        grads.position[i] = W.T @ d_pcam + d_dir
        grads.sh[i] = np.outer(d_raw, c.basis)

        # scale (log) and orientation through cov3 = R diag(s^2) R^T
        RtGR = c.R.T @ d_cov3 @ c.R
        grads.log_scale[i] = 2.0 * (c.D_s**2) * np.diag(RtGR)
        d_R = 2.0 * d_cov3 @ c.R * (c.D_s**2)[None, :]
        partials = quat_rotation_partials(c.q_unit)   # (4, 3, 3)
        d_q = np.einsum("aij,ij->a", partials, d_R)
        grads.orientation[i] = d_q - c.q_unit * float(c.q_unit @ d_q)
    return loss, grads
