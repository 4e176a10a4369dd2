"""Exception types shared across the package."""


class QPlaneError(Exception):
    """Base class for package-specific errors."""


class SpecError(QPlaneError, ValueError):
    """Malformed set spec, field parameters, or run configuration."""


class SizeLimitError(QPlaneError, RuntimeError):
    """A configured size cap blocks the requested computation."""


class NormMismatchError(QPlaneError, ValueError):
    """Isometry requested between configurations of different norms."""


class IsotropicRigidityError(QPlaneError, ValueError):
    """Rigidity recovery requested for a nonzero isotropic difference.

    When -1 is a square the form vanishes on nonzero vectors and the
    two-point transport guarantee does not apply; callers must handle
    these configurations explicitly.
    """


class NonSquareRatioError(QPlaneError, ValueError):
    """Product transport requested with a non-square distance ratio."""
