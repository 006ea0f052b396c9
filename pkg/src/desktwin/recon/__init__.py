from .cloud import OrientedPointCloud, load_point_cloud, save_point_cloud
from .mesh import TriangleMesh, load_mesh_obj, save_mesh_obj, save_mesh_ply
from .grid import ScalarGrid, VectorGrid, divergence, splat_vector_field
from .normals import estimate_normals
from .poisson import CGReport, solve_poisson
from .marching_cubes import marching_cubes
from .pipeline import reconstruct

__all__ = [
    "OrientedPointCloud",
    "load_point_cloud",
    "save_point_cloud",
    "TriangleMesh",
    "load_mesh_obj",
    "save_mesh_obj",
    "save_mesh_ply",
    "ScalarGrid",
    "VectorGrid",
    "divergence",
    "splat_vector_field",
    "estimate_normals",
    "CGReport",
    "solve_poisson",
    "marching_cubes",
    "reconstruct",
]
