"""Exception types shared across the magnodrag package."""


class MagnodragError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MagnodragError):
    """Malformed or schema-violating configuration input."""


class NoPhysicalRootError(MagnodragError):
    """The steady-state cubic has no real, non-negative root."""


class ResidualTooLargeError(MagnodragError):
    """Root polishing failed to bring the stationary residual below tolerance."""


class SingularResponseError(MagnodragError):
    """Probe response requested exactly on (or too close to) a response pole."""


class NonphysicalIndexError(MagnodragError):
    """Refractive index too close to zero for the drag formula."""


class AxisMismatchError(MagnodragError):
    """Feature extraction requested on a table with an incompatible sweep axis."""


class SweepError(MagnodragError):
    """Too many sweep rows failed; the table would be mostly gaps."""
