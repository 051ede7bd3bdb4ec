"""Exception types shared across the package.

Every error raised by hullguard derives from :class:`HullguardError` so callers
can catch the whole family at service boundaries while tests assert on the
specific class.
"""


class HullguardError(Exception):
    """Base class for all hullguard errors."""


class ParameterError(HullguardError):
    """An argument violates a documented precondition (bad leaf size, dimension
    mismatch, non-unit normal, ...)."""


class DegenerateGeometryError(HullguardError):
    """Input point set cannot support the requested construction.

    ``mode`` names the failure: "too-few-points", "collinear" or "coplanar".
    """

    def __init__(self, mode: str, message: str | None = None):
        self.mode = mode
        super().__init__(message or f"degenerate geometry: {mode}")


class TopologyError(HullguardError):
    """Mesh connectivity violates what the operation requires (non-watertight
    input to decimation, inconsistent winding, ...)."""


class GeometryError(HullguardError):
    """Mesh fails a geometric requirement (e.g. convexity) of the operation."""


class NotVisibleError(HullguardError):
    """Requested object contributes no pixels to the depth view."""


class TooSparseError(HullguardError):
    """Sub-cloud too sparse to form a cluster; no collision mesh was built."""


class UnparseableError(HullguardError):
    """Transcript yielded no usable command. Carries the raw text."""

    def __init__(self, raw_text: str, reason: str = "no command verb recognized"):
        self.raw_text = raw_text
        self.reason = reason
        super().__init__(f"{reason} in: {raw_text!r}")


class ProtocolError(HullguardError):
    """External resolver endpoint replied with something outside the v1 intent
    schema."""


class CalibrationError(HullguardError):
    """Workspace sweep was degenerate; a wider sweep is needed."""


class NotCalibratedError(HullguardError):
    """Device events arrived before workspace calibration."""


class ReplayIntegrityError(HullguardError):
    """Log header hashes do not match the scene/robot/config being replayed."""


class InfeasibleError(HullguardError):
    """QP constraint set admits no solution.

    ``rows`` holds an irreducible infeasible subset of constraint indices
    (indices >= the number of user rows refer to variable bounds).
    """

    def __init__(self, rows: tuple[int, ...], message: str | None = None):
        self.rows = tuple(rows)
        super().__init__(message or f"infeasible constraint set, irreducible rows {self.rows}")


class SolverError(HullguardError):
    """QP solver failed to converge; indicates a numerical problem, not an
    infeasible model."""
