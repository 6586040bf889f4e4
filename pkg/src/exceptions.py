"""Custom exceptions for the surface-mapper library."""


class SurfaceError(Exception):
    """Base class for errors raised by the numerical library."""


class ConfigError(Exception):
    """Raised when configuration files are missing or malformed."""


class GeometryError(SurfaceError):
    """Raised when interval or parameter data lie outside the valid domain."""


class DegenerateIntervalsError(GeometryError):
    """Raised when user intervals touch, overlap or are mis-ordered."""


class NegativeDiscriminantError(SurfaceError):
    """Raised when a real quadratic has no real roots."""


class NoConvergenceError(SurfaceError):
    """Raised when an iteration reaches its cap without meeting its tolerance."""

    def __init__(self, message: str, step: int | None = None, target=None):
        super().__init__(message)
        self.step = step
        self.target = target

    def __reduce__(self):
        return (type(self), (str(self), self.step, self.target))


class LeftDomainError(NoConvergenceError):
    """Raised when Newton iterates cannot be kept inside the open triangle."""


class SingularJacobianError(SurfaceError):
    """Raised when the Newton Jacobian is numerically singular."""


class InconsistentCoefficientsError(SurfaceError):
    """Raised when the closed-form and direct values of H(a) disagree."""


class PoleError(SurfaceError):
    """Raised when a map is evaluated at one of its poles."""


class OnCutError(SurfaceError):
    """Raised when a real point inside a cut carries no bank tag."""


class BranchPointError(SurfaceError):
    """Raised when a point is too close to a branch point to separate sheets."""

    def __init__(self, message: str, branch_point: float, root: complex, multiplicity: int = 2):
        super().__init__(message)
        self.branch_point = branch_point
        self.root = root
        self.multiplicity = multiplicity


class TraceFailureError(SurfaceError):
    """Raised when branch-curve tracing produces curves that do not close or cross."""
