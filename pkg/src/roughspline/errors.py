"""Exception hierarchy. Every library error derives from RoughSplineError."""


class RoughSplineError(Exception):
    pass


class InvalidParameters(RoughSplineError, ValueError):
    pass


class OverrideBelowFloor(InvalidParameters):
    pass


class NegativeRadius(InvalidParameters):
    pass


class KOutOfRange(InvalidParameters):
    pass


class RoughSpaceNotContinuous(InvalidParameters):
    pass


class DegenerateDomain(InvalidParameters):
    pass


class EmptyPointSet(InvalidParameters):
    pass


class TooFewPoints(InvalidParameters):
    pass


class InvalidExponent(InvalidParameters):
    pass


class InsufficientSeparation(InvalidParameters):
    pass


class NotUnisolvent(RoughSplineError):
    pass


class SingularSystem(RoughSplineError):
    pass


class NegativeEnergy(RoughSplineError):
    """Quadratic form came out clearly negative: the solve is not trustworthy."""


class DerivativeUnavailable(RoughSplineError):
    pass


class WeightedUnsupported(RoughSplineError):
    pass


class MomentSystemSingular(RoughSplineError):
    pass


class QuadratureUnderresolved(RoughSplineError):
    pass


class InsufficientPoints(InvalidParameters):
    pass


class NonpositiveInput(InvalidParameters):
    pass


class AllLevelsFailed(RoughSplineError):
    pass


class ConfigError(RoughSplineError):
    pass


class IllConditionedWarning(UserWarning):
    pass
