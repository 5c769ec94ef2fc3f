class NormalFanError(Exception):
    """Base class for the package's errors."""


class NotConvexError(NormalFanError, ValueError):
    """A body model failed the sampled strict-convexity witness."""


class NonPositiveRadius(NormalFanError):
    """A curvature radius came out <= 0 (non-convex model or derivative failure)."""


class NotCritical(NormalFanError):
    """The direction is not a critical point of the shifted support function."""


class DegenerateCritical(NormalFanError):
    """A critical point has a numerically singular Hessian (the point is near the focal surface)."""


class PreconditionViolated(NormalFanError):
    """The normal line is too close to the singular locus of the focal surface."""


class TrackingAmbiguity(NormalFanError):
    """Critical points could not be matched injectively between sweep samples."""


class Unclassifiable(NormalFanError):
    """A bracket contains more than one bifurcation."""


class WitnessNotFound(NormalFanError):
    """No parameter with at least six normals was found in the curvature window."""

    def __init__(self, message, profile=None, verdict=None):
        super().__init__(message)
        self.profile = profile
        self.verdict = verdict


class ConfigInvalid(NormalFanError, ValueError):
    """An experiment configuration does not validate."""
