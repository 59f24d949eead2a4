"""Exception hierarchy.

Every validity failure is a :class:`DomainError` so callers (the scenario
runner in particular) can count invalid points without catching unrelated
bugs.
"""


class NatliftError(Exception):
    """Base class for all package errors."""


class DomainError(NatliftError, ValueError):
    """An evaluation left the domain where the construction is defined."""


class NonpositiveA1(DomainError):
    pass


class DegenerateDenominator(DomainError):
    pass


class NonpositiveLambda(DomainError):
    pass


class IndefiniteMetric(DomainError):
    pass


class ZeroCurvature(DomainError):
    pass


class ZeroHolomorphicCurvature(DomainError):
    pass


class OutsideChart(DomainError):
    pass


class ConfigError(NatliftError):
    """A scenario file or profile string could not be understood."""


class ProfileSyntaxError(ConfigError, ValueError):
    pass
