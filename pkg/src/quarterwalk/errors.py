"""Exception hierarchy shared by every module."""


class QuarterWalkError(ValueError):
    """Base class for all package errors."""


class NonPositiveProbability(QuarterWalkError):
    """A transition probability is zero or negative."""


class SumNotOne(QuarterWalkError):
    """The four transition probabilities do not sum to one."""


class NegativeDrift(QuarterWalkError):
    """A drift component is negative."""


class WrongRegime(QuarterWalkError):
    """The requested quantity is not defined for this drift class."""


class OutOfRange(QuarterWalkError):
    pass


class OnCut(QuarterWalkError):
    pass


class OnCircle(QuarterWalkError):
    pass


class PoleAtZero(QuarterWalkError):
    pass


class SeriesDepthExceeded(QuarterWalkError):
    pass


class CapTooSmall(QuarterWalkError):
    pass


class NonFiniteIntegrand(QuarterWalkError):
    pass


class PoleNearContour(QuarterWalkError):
    pass


class DomainViolation(QuarterWalkError):
    pass


class QuadratureFailure(QuarterWalkError):
    pass
