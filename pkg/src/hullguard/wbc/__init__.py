"""Whole-body velocity controller: QP solver, Cartesian tasks, velocity
damping constraints and the per-step control loop."""
from .constraints import (DISTANCE_REPORT_CAP, ConstraintRow, DampingParams,
                          collect_constraints, damping_constraint_row)
from .controller import (TASK_SCALE_LADDER, ControllerParams, StepReport,
                         control_step, load_controller_config)
from .qp import REGULARIZATION, QpProblem, solve_qp
from .tasks import (CartesianReference, VelocityBounds, assemble_qp,
                    cartesian_velocity_command, integration_bounds,
                    orientation_error)

__all__ = [
    "DISTANCE_REPORT_CAP", "REGULARIZATION", "TASK_SCALE_LADDER",
    "CartesianReference", "ConstraintRow", "ControllerParams", "DampingParams",
    "QpProblem", "StepReport", "VelocityBounds", "assemble_qp",
    "cartesian_velocity_command", "collect_constraints", "control_step",
    "damping_constraint_row", "integration_bounds", "load_controller_config",
    "orientation_error", "solve_qp",
]
