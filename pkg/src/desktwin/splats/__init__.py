from .types import ImageBuffer, PinholeCamera, ProjectedSplat, SplatGaussian, SplatSet
from .ply import load_splats, save_splats
from .sh import eval_color, sh_basis, sh_dim
from .transform import transform_set
from .project import project_set, project_splat
from .render import render_reference, render_tiled

__all__ = [
    "ImageBuffer",
    "PinholeCamera",
    "ProjectedSplat",
    "SplatGaussian",
    "SplatSet",
    "load_splats",
    "save_splats",
    "eval_color",
    "sh_basis",
    "sh_dim",
    "transform_set",
    "project_set",
    "project_splat",
    "render_reference",
    "render_tiled",
]
