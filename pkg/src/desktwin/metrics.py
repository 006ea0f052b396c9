"""Image quality metrics (PSNR, SSIM) and render throughput.

SSIM follows the exponent-weighted luminance/contrast/structure product with
an 11x11 sigma-1.5 Gaussian window; the structure term uses the half-c2
stabilizer. RGB inputs are reduced to grayscale by channel mean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve

from .splats.types import ImageBuffer


@dataclass
class SSIMParams:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    max_i: float = 1.0
    c1: float | None = None
    c2: float | None = None
    window_size: int = 11
    window_sigma: float = 1.5

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) <= 0:
            raise ValueError("exponents must be positive")
        if self.c1 is None:
            self.c1 = (0.01 * self.max_i) ** 2
        if self.c2 is None:
            self.c2 = (0.03 * self.max_i) ** 2
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("stabilizers must be positive")


@dataclass
class MetricReport:
    psnr: float
    ssim: float
    fps: float | None = None
    width: int = 0
    height: int = 0
    channels: int = 0

    def to_dict(self) -> dict:
        return {
            "psnr": "inf" if math.isinf(self.psnr) else self.psnr,
            "ssim": self.ssim,
            "fps": self.fps,
            "width": self.width,
            "height": self.height,
            "channels": self.channels,
        }


def _check_shapes(x: ImageBuffer, y: ImageBuffer):
    if not x.same_shape(y):
        raise ValueError(
            f"image dimensions differ: {x.pixels.shape} vs {y.pixels.shape}")


def mse(x: ImageBuffer, y: ImageBuffer) -> float:
    _check_shapes(x, y)
    return float(np.mean((x.pixels - y.pixels) ** 2))


def psnr(x: ImageBuffer, y: ImageBuffer, max_i: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical images.

    `max_i` rescales both images from [0,1] to the stated peak, so 8-bit
    comparisons use max_i=255.
    """
    if max_i <= 0:
        raise ValueError("max_i must be positive")
    err = mse(x, y) * max_i**2
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(max_i**2 / err)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-0.5 * (r / sigma) ** 2)
    w = np.outer(g, g)
    return w / w.sum()


def _signed_power(base: np.ndarray, exponent: float) -> np.ndarray:
    return np.sign(base) * np.abs(base) ** exponent


def ssim(x: ImageBuffer, y: ImageBuffer, params: SSIMParams | None = None) -> float:
    """Mean structural similarity over all full windows."""
    p = params or SSIMParams()
    _check_shapes(x, y)
    gx = x.gray().pixels[:, :, 0]
    gy = y.gray().pixels[:, :, 0]
    if min(gx.shape) < p.window_size:
        raise ValueError("image smaller than the SSIM window")
    w = _gaussian_window(p.window_size, p.window_sigma)

    def win(img):
        return convolve(img, w, mode="constant")

    half = p.window_size // 2
    crop = (slice(half, gx.shape[0] - half), slice(half, gx.shape[1] - half))
    mu_x = win(gx)[crop]
    mu_y = win(gy)[crop]
    var_x = np.maximum(win(gx * gx)[crop] - mu_x**2, 0.0)
    var_y = np.maximum(win(gy * gy)[crop] - mu_y**2, 0.0)
    cov = win(gx * gy)[crop] - mu_x * mu_y
    sd_x, sd_y = np.sqrt(var_x), np.sqrt(var_y)

    lum = (2 * mu_x * mu_y + p.c1) / (mu_x**2 + mu_y**2 + p.c1)
    con = (2 * sd_x * sd_y + p.c2) / (var_x + var_y + p.c2)
    struct = (cov + 0.5 * p.c2) / (sd_x * sd_y + 0.5 * p.c2)
    score = (_signed_power(lum, p.alpha) * _signed_power(con, p.beta)
             * _signed_power(struct, p.gamma))
    return float(score.mean())


def fps_meter(frame_count: int, elapsed: float) -> float:
    """Frames rendered per second over a measured interval."""
    if elapsed <= 0:
        raise ValueError("elapsed time must be positive")
    return frame_count / elapsed


def compare(x: ImageBuffer, y: ImageBuffer, max_i: float = 1.0,
            fps: float | None = None) -> MetricReport:
    return MetricReport(psnr=psnr(x, y, max_i), ssim=ssim(x, y), fps=fps,
                        width=x.width, height=x.height, channels=x.channels)
