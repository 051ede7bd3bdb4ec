"""Active-obstacle registry and intent application.

apply_intent never raises for per-phrase failures: teleoperation must keep
running, so grounding misses, invisible objects, and sparse clouds surface as
outcomes in the returned report instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DegenerateGeometryError, NotVisibleError, TooSparseError
from ..perception import (
    CollisionMesh,
    DepthView,
    PipelineParams,
    SceneObject,
    build_collision_mesh,
    ground_phrase,
    project_mask_to_subcloud,
)
from .intent import Intent


@dataclass
class ObstacleRegistry:
    """At most one collision mesh per object id; history is append-only."""

    active: dict[str, CollisionMesh] = field(default_factory=dict)
    history: list[tuple[int, Intent, list[dict]]] = field(default_factory=list)

    def snapshot(self) -> dict[str, CollisionMesh]:
        """Point-in-time copy for the controller's constraint source."""
        return dict(self.active)


def apply_intent(registry: ObstacleRegistry, intent: Intent,
                 scene: list[SceneObject], view: DepthView,
                 params: PipelineParams | None = None,
                 now_ms: int = 0) -> list[dict]:
    """Resolve each phrase against the scene and mutate the registry.

    Returns one report entry per (phrase, resolved object): {"phrase",
    "object_id" (None when grounding fails), "outcome"} with outcome in
    {added, replaced, removed, not-found, not-visible, too-sparse}.
    """
    params = params or PipelineParams()
    report = []
    for phrase in intent.enable:
        matches = ground_phrase(phrase, scene)
        if not matches:
            report.append({"phrase": phrase, "object_id": None,
                           "outcome": "not-found"})
            continue
        for obj in matches:
            try:
                subcloud = project_mask_to_subcloud(view, obj.id)
                mesh = build_collision_mesh(subcloud, params, view.camera_pose,
                                            source_object=obj.id,
                                            created_at_ms=now_ms)
            except NotVisibleError:
                outcome = "not-visible"
            except (TooSparseError, DegenerateGeometryError):
                # A degenerate hull means the visible patch carries too little
                # 3D structure — same operator remedy as a sparse cluster.
                outcome = "too-sparse"
            else:
                outcome = "replaced" if obj.id in registry.active else "added"
                registry.active[obj.id] = mesh
            report.append({"phrase": phrase, "object_id": obj.id,
                           "outcome": outcome})
    for phrase in intent.disable:
        matches = ground_phrase(phrase, scene)
        if not matches:
            report.append({"phrase": phrase, "object_id": None,
                           "outcome": "not-found"})
            continue
        for obj in matches:
            if obj.id in registry.active:
                del registry.active[obj.id]
                outcome = "removed"
            else:
                outcome = "not-found"
            report.append({"phrase": phrase, "object_id": obj.id,
                           "outcome": outcome})
    registry.history.append((now_ms, intent, report))
    return report
