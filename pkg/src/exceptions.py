"""
Exception hierarchy for the shadowing lab.

Every failure raised by library code derives from ``ShadowLabError`` so the
CLI can map it onto an exit code and a JSON error report.
"""


class ShadowLabError(Exception):
    """Base exception for the shadowing lab."""

    pass


class InvalidParameterError(ShadowLabError, ValueError):
    """A pre-condition on an argument does not hold."""

    pass


class NegativeTimeError(InvalidParameterError):
    """A semigroup was asked for T(t) with t < 0."""

    pass


class OffGridError(InvalidParameterError):
    """A time is not an integer multiple of the model's time grid."""

    pass


class DimensionMismatchError(InvalidParameterError):
    """Vectors, matrices or splittings of different dimension were combined."""

    pass


class ZeroThetaError(InvalidParameterError):
    """A model needing a nonzero rate was given theta = 0."""

    pass


class WindowTooSmallError(InvalidParameterError):
    """The weighted-shift window is too small to have interior coordinates."""

    pass


class ParameterTooSmallError(InvalidParameterError):
    """A demo parameter is too small for its conclusion to be strict."""

    pass


class OutOfRangeError(InvalidParameterError):
    """A time lies outside [0, t_n) of a pseudo-orbit."""

    pass


class SpectralError(ShadowLabError):
    """Base class for spectral computations."""

    pass


class EigFailureError(SpectralError):
    """The eigen- or Schur decomposition failed or returned non-finite values."""

    pass


class SingularResolventError(SpectralError):
    """A sampled point of the imaginary axis is numerically in the spectrum."""

    pass


class NotHyperbolicError(SpectralError):
    """The semigroup has spectrum of T(1) on the unit circle."""

    pass


class ShadowingError(ShadowLabError):
    """Base class for solver failures."""

    pass


class InvalidPseudoOrbitError(ShadowingError):
    """The pseudo-orbit violates the (delta, R) requirements of a solver."""

    pass


class BoundNotCertifiedError(ShadowingError):
    """A declared decay bound K e^{-lambda t} is violated by the semigroup."""

    pass


class NotInvertibleError(ShadowingError):
    """The solver needs T(t)^{-1} but the semigroup has none."""

    pass


class RankDeficientError(ShadowingError):
    """The oracle's least-squares system does not have full column rank."""

    pass


class ModelError(ShadowLabError):
    """Base class for model-level consistency failures."""

    pass


class NeitherConventionHoldsError(ModelError):
    """Neither weight convention reproduces the weighted-shift decay identities."""

    pass


class WindowExitError(ModelError):
    """Support of a weighted-shift state reached the edge of the window."""

    pass


class ConfigError(ShadowLabError):
    """The experiment configuration could not be read or validated."""

    pass
