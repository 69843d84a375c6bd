"""Exception types raised by the geometry, control and estimation code."""


class VerticalTangentError(ValueError):
    """Curve is not locally a graph over the x axis."""


class SingularCurveError(ValueError):
    """Tangent vector vanishes where a direction is needed."""


class InfeasibleCurvatureError(ValueError):
    """|d * kappa| >= 1, so the feedforward steering is undefined."""


class ObservabilityError(ValueError):
    """sin(delta - theta) vanished: the observed point left the camera FOV."""


class PerceptionError(ValueError):
    """Relative heading too large to express the lane as eta(tau)."""


class PathRangeError(ValueError):
    """Arc length outside the table of an open path."""
