from .gradients import SplatGradients, photometric_loss, render_with_gradients
from .fit import FitConfig, fit_splats

__all__ = [
    "SplatGradients",
    "photometric_loss",
    "render_with_gradients",
    "FitConfig",
    "fit_splats",
]
