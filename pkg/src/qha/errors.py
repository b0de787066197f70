"""Exception types raised by the toolkit."""


class QhaError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(QhaError):
    """Invalid experiment configuration or CLI input (usage error, exit 2)."""


class ShapeTooLarge(QhaError):
    """Scaled shape does not fit within half the torus extent."""


class NotHermitian(QhaError):
    """Matrix fails the Hermitian tolerance required by the operation."""


class ZeroVector(QhaError):
    """Vector with (numerically) zero norm where a unit vector is required."""


class BadWeights(QhaError):
    """Mixture weights are negative or do not sum to one."""


class BadSmoother(QhaError):
    """Smoothing function is not a nonnegative unit-mass grid."""


class InvalidDensity(QhaError):
    """Matrix fails the density-operator checks (Hermitian/positive/unit trace)."""


class BadDelta(QhaError):
    """Threshold parameter outside its admissible range."""


class EmptyDomain(QhaError):
    """Domain with zero measure where a positive measure is required."""


class ConsistencyFailure(QhaError):
    """Two independent computation routes disagree beyond tolerance."""


class MismatchedState(QhaError):
    """Operation combined artifacts produced from different states/lattices."""


class NotABall(QhaError):
    """Operation requires a ball shape centered at the origin."""


class BoundViolation(QhaError):
    """A computed row violates one of the asserted finite-size inequalities."""
