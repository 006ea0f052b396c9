"""Toy-scale splat fitting by plain gradient descent on photometric loss.

Opacity and scale updates run in logit/log space so type invariants survive
any finite step; orientations are renormalized after every step.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from ..splats.types import ImageBuffer, PinholeCamera, SplatSet
from .gradients import SplatGradients, render_with_gradients


@dataclass
class FitConfig:
    """Defaults are tuned for desk-scale fits (tens of splats, 64x64 views);
    the mean-over-pixels loss makes raw gradients small, hence the large
    learning rates."""

    iterations: int = 500
    lr_position: float = 4.0
    lr_log_scale: float = 4.0
    lr_orientation: float = 4.0
    lr_opacity_logit: float = 10.0
    lr_sh: float = 10.0
    loss: str = "l2"
    workers: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        rates = (self.lr_position, self.lr_log_scale, self.lr_orientation,
                 self.lr_opacity_logit, self.lr_sh)
        if min(rates) < 0 or max(rates) <= 0:
            raise ValueError("learning rates must be positive")
        if self.loss != "l2":
            raise ValueError("only the l2 photometric loss is supported")


def _evaluate_views(splat_set: SplatSet,
                    views: list[tuple[PinholeCamera, ImageBuffer]],
                    workers: int) -> tuple[float, SplatGradients]:
    """Mean loss and gradients over views, summed in view order."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda v: render_with_gradients(v[0], splat_set, v[1]), views))
    else:
        results = [render_with_gradients(c, splat_set, t) for c, t in views]
    total = SplatGradients.zeros(len(splat_set), splat_set.sh_degree)
    loss_sum = 0.0
    for loss, grads in results:  # deterministic accumulation order
        loss_sum += loss
        total.add_(grads)
    n = len(views)
    return loss_sum / n, total.scaled(1.0 / n)


def fit_splats(init: SplatSet, views: list[tuple[PinholeCamera, ImageBuffer]],
               cfg: FitConfig | None = None) -> tuple[SplatSet, list[float]]:
    """Gradient-descend a splat set toward the given posed target images.

    Returns the fitted set and the per-iteration mean loss across views
    (measured before each update).
    """
    if not views:
        raise ValueError("at least one view is required")
    if len(init) == 0:
        raise ValueError("initial set must be nonempty")
    cfg = cfg or FitConfig()

    current = init.copy()
    history: list[float] = []
    for it in range(cfg.iterations):
        loss, grads = _evaluate_views(current, views, cfg.workers)
        if not np.isfinite(loss):
            raise NumericError(f"non-finite loss at iteration {it}")
        history.append(loss)

        current.positions -= cfg.lr_position * grads.position
        # multiplicative log/logit-space steps; the +-30 clip keeps opacity
        # strictly inside (0,1) and scales positive under float saturation
        scale_factor = np.exp(np.clip(-cfg.lr_log_scale * grads.log_scale,
                                      -30.0, 30.0))
        current.scales = current.scales * scale_factor
        odds_factor = np.exp(np.clip(-cfg.lr_opacity_logit * grads.opacity_logit,
                                     -30.0, 30.0))
        odds = current.opacities / (1.0 - current.opacities) * odds_factor
        current.opacities = np.where(odds_factor == 1.0, current.opacities,
                                     odds / (1.0 + odds))
        current.orientations -= cfg.lr_orientation * grads.orientation
        current.orientations /= np.linalg.norm(current.orientations, axis=1,
                                               keepdims=True)
        current.sh_coeffs -= cfg.lr_sh * grads.sh
    return current, history
