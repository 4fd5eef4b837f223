"""Exception types shared across the package."""


class VnqcaError(Exception):
    """Base class for package errors."""


class GeometryError(VnqcaError):
    """Invalid lattice geometry (odd extents, wrap-around cones, ...)."""


class ConfigError(VnqcaError):
    """Invalid parameters or configuration."""


class SimulationCapError(VnqcaError):
    """Requested dense simulation exceeds the qubit cap."""


class VerificationError(VnqcaError):
    """A verification step failed on invalid input."""


class ClosureError(VnqcaError):
    """Algebra closure failed to stabilize."""
