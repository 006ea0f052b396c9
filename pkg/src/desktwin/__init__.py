"""Desk-scale digital-twin engine.

Renders hybrid scenes of 3D gaussian splat assets and triangle meshes,
reconstructs meshes from oriented point clouds, scores renders with image
quality metrics, and edits live scenarios through a hierarchy of language
model agents and rule-based workers.
"""

__version__ = "0.1.0"
