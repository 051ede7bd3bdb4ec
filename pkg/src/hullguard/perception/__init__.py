"""Scene description, synthetic depth sensing, and the cloud-to-mesh pipeline."""
from .camera import (
    CameraIntrinsics,
    DepthView,
    project_mask_to_subcloud,
    render_depth_view,
)
from .grounding import ground_phrase, score_object
from .pipeline import CollisionMesh, PipelineParams, build_collision_mesh
from .scene import SceneObject, load_scene, save_scene, validate_scene

__all__ = [
    "CameraIntrinsics",
    "CollisionMesh",
    "DepthView",
    "PipelineParams",
    "SceneObject",
    "build_collision_mesh",
    "ground_phrase",
    "load_scene",
    "project_mask_to_subcloud",
    "render_depth_view",
    "save_scene",
    "score_object",
    "validate_scene",
]
