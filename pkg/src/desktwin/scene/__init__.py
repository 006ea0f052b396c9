from .catalog import AssetCatalog, CatalogEntry
from .environment import EnvironmentState, illumination_scale, sun_direction
from .graph import SceneAsset, SceneDiff, SceneGraph, scene_equal

__all__ = [
    "AssetCatalog",
    "CatalogEntry",
    "EnvironmentState",
    "illumination_scale",
    "sun_direction",
    "SceneAsset",
    "SceneDiff",
    "SceneGraph",
    "scene_equal",
]
