"""Exception types shared across the package.

``PhysicsError`` subclasses signal a request that is well-formed but
physically impossible (the CLI maps them to exit code 1). Plain
``ValueError``/``IndexError`` are reserved for malformed input.
"""


class PhysicsError(ValueError):
    """A well-formed request that violates a physical constraint."""


class InfeasibleBudgetError(PhysicsError):
    """The photon budget is smaller than the photons spent on squeezing."""


class UncertaintyViolationError(PhysicsError):
    """Parameters that would violate the uncertainty principle."""


class BracketError(PhysicsError):
    """The root bracket does not enclose a sign change."""
