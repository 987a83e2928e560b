"""Exception types shared across the package."""


class HypRobinError(Exception):
    """Base class for all package-specific failures."""


class BracketError(HypRobinError):
    """No sign change of the shooting residual inside the search bracket."""


class IntegrationError(HypRobinError):
    """Adaptive ODE integration failed (step underflow or step budget)."""


class SolverError(HypRobinError):
    """Eigenvalue solve failed or produced an inconsistent eigenpair."""


class MeshError(HypRobinError):
    """Mesh generation produced degenerate or inconsistent elements."""


class FocalError(HypRobinError, ValueError):
    """Parallel-curvature evaluation past the focal horizon."""


class ResolutionError(HypRobinError):
    """Sampling resolution too coarse for the requested accuracy."""


class MonotonicityError(HypRobinError):
    """Radial eigenfunction profile violates the expected monotonicity."""


class HconvexityError(HypRobinError):
    """Input domain is not horospherically convex (hypothesis violation)."""


class ConfigError(HypRobinError, ValueError):
    """Malformed run configuration; carries the offending field name."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
