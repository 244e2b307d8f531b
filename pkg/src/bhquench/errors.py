"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid physical parameters or malformed configuration input."""


class CapacityError(ValidationError):
    """Requested problem size exceeds a configured ceiling."""


class SectorError(ValueError):
    """Occupation vector does not belong to the requested number sector."""


class ConvergenceError(RuntimeError):
    """Iterative solver failed to reach its tolerance within the iteration cap."""
