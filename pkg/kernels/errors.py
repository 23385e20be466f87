"""
Exception hierarchy shared by every app.

Numerical code raises these; the flow loop turns them into terminations and the
management command turns them into exit codes.
"""


class TubeflowError(Exception):
    """Base class for every error raised by the solver."""


class KernelDomainError(TubeflowError, ValueError):
    """A radius outside (0, r_cut) was handed to a root kernel."""


class PoleError(TubeflowError, ArithmeticError):
    """A kernel was evaluated at (or numerically on top of) a singularity."""


class RangeError(TubeflowError, ValueError):
    """The argument of the inverse volume profile exceeds its range."""


class ModelError(TubeflowError, ValueError):
    """A SpaceModel violates its invariants."""


class PresetIncomplete(ModelError):
    """A table preset was used without the multiplicities it requires."""


class DomainError(TubeflowError, ValueError):
    """A base domain or radius field is malformed (grid, weights, non-positive radii)."""
