"""hullguard: desk-scale bimanual teleoperation with perception-built convex
obstacles and a velocity-damping whole-body controller."""

__version__ = "0.1.0"
