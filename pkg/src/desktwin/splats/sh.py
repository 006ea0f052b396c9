"""Real spherical-harmonic color basis, degrees 0..3.

Basis ordering is (l, m) flattened as l*(l+1)+m, the layout used by published
splat assets. A channel's color is clamp(sum_k coeff_k * basis_k + 0.5, 0, 1).
"""
from __future__ import annotations

import numpy as np

C0 = 0.28209479177387814
C1 = 0.4886025119029199
C2 = (1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
      -1.0925484305920792, 0.5462742152960396)
C3 = (-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
      0.3731763325901154, -0.4570457994644658, 1.445305721320277,
      -0.5900435899266435)

DIR_NORM_TOL = 1e-6


def sh_dim(degree: int) -> int:
    """Number of basis functions per channel for a given degree."""
    return (degree + 1) ** 2


def sh_basis(degree: int, dirs: np.ndarray) -> np.ndarray:
    """Basis values for unit direction(s); dirs (3,) or (N, 3) -> (..., dim)."""
    d = np.asarray(dirs, dtype=np.float64)
    single = d.ndim == 1
    d = np.atleast_2d(d)
    x, y, z = d[:, 0], d[:, 1], d[:, 2]
    out = np.empty((len(d), sh_dim(degree)))
    out[:, 0] = C0
    if degree >= 1:
        out[:, 1] = -C1 * y
        out[:, 2] = C1 * z
        out[:, 3] = -C1 * x
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        out[:, 4] = C2[0] * x * y
        out[:, 5] = C2[1] * y * z
        out[:, 6] = C2[2] * (2.0 * zz - xx - yy)
        out[:, 7] = C2[3] * x * z
        out[:, 8] = C2[4] * (xx - yy)
    if degree >= 3:
        xx, yy, zz = x * x, y * y, z * z
        out[:, 9] = C3[0] * y * (3.0 * xx - yy)
        out[:, 10] = C3[1] * x * y * z
        out[:, 11] = C3[2] * y * (4.0 * zz - xx - yy)
        out[:, 12] = C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy)
        out[:, 13] = C3[4] * x * (4.0 * zz - xx - yy)
        out[:, 14] = C3[5] * z * (xx - yy)
        out[:, 15] = C3[6] * x * (xx - 3.0 * yy)
    return out[0] if single else out


def sh_basis_grad(degree: int, direction: np.ndarray) -> np.ndarray:
    """Partials of every basis function w.r.t. the (unnormalized) direction
    components, evaluated at a unit direction; shape (dim, 3)."""
    x, y, z = np.asarray(direction, dtype=np.float64)
    g = np.zeros((sh_dim(degree), 3))
    if degree >= 1:
        g[1] = (0.0, -C1, 0.0)
        g[2] = (0.0, 0.0, C1)
        g[3] = (-C1, 0.0, 0.0)
    if degree >= 2:
        g[4] = (C2[0] * y, C2[0] * x, 0.0)
        g[5] = (0.0, C2[1] * z, C2[1] * y)
        g[6] = (-2.0 * C2[2] * x, -2.0 * C2[2] * y, 4.0 * C2[2] * z)
        g[7] = (C2[3] * z, 0.0, C2[3] * x)
        g[8] = (2.0 * C2[4] * x, -2.0 * C2[4] * y, 0.0)
    if degree >= 3:
        g[9] = (6.0 * C3[0] * x * y, C3[0] * (3.0 * x * x - 3.0 * y * y), 0.0)
        g[10] = (C3[1] * y * z, C3[1] * x * z, C3[1] * x * y)
        g[11] = (-2.0 * C3[2] * x * y,
                 C3[2] * (4.0 * z * z - x * x - 3.0 * y * y),
                 8.0 * C3[2] * y * z)
        g[12] = (-6.0 * C3[3] * x * z, -6.0 * C3[3] * y * z,
                 C3[3] * (6.0 * z * z - 3.0 * x * x - 3.0 * y * y))
        g[13] = (C3[4] * (4.0 * z * z - 3.0 * x * x - y * y),
                 -2.0 * C3[4] * x * y, 8.0 * C3[4] * x * z)
        g[14] = (2.0 * C3[5] * x * z, -2.0 * C3[5] * y * z,
                 C3[5] * (x * x - y * y))
        g[15] = (C3[6] * (3.0 * x * x - 3.0 * y * y), -6.0 * C3[6] * x * y, 0.0)
    return g


def eval_color(g, view_dir: np.ndarray) -> np.ndarray:
    """View-dependent RGB of one splat; view_dir must be unit length."""
    v = np.asarray(view_dir, dtype=np.float64)
    if abs(np.linalg.norm(v) - 1.0) > DIR_NORM_TOL:
        raise ValueError("view_dir must be a unit vector")
    basis = sh_basis(g.sh_degree, v)
    return np.clip(g.sh_coeffs @ basis + 0.5, 0.0, 1.0)


def eval_colors(sh_coeffs: np.ndarray, degree: int, view_dirs: np.ndarray) -> np.ndarray:
    """Batch color evaluation: coeffs (N, 3, dim), dirs (N, 3) -> (N, 3)."""
    basis = sh_basis(degree, view_dirs)  # (N, dim)
    raw = np.einsum("nck,nk->nc", sh_coeffs, basis) + 0.5
    return np.clip(raw, 0.0, 1.0)
