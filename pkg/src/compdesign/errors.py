"""Exception hierarchy shared by all modules.

Everything a caller can fix by changing its inputs derives from
:class:`DomainError`; the CLI maps those to exit code 1.
"""


class DomainError(ValueError):
    """Invalid input or a violated domain invariant."""


class NegativeFraction(DomainError):
    pass


class SumViolation(DomainError):
    pass


class DimensionMismatch(DomainError):
    pass


class EmptyPopulation(DomainError):
    pass


class GridTooLarge(DomainError):
    pass


class BadReference(DomainError):
    pass


class NoRuleFired(DomainError):
    pass


class ZeroArea(DomainError):
    pass


class ParseError(DomainError):
    pass


class CoverageGap(DomainError):
    pass


class UnknownLabel(DomainError):
    pass


class DatasetTooSmall(DomainError):
    pass


class ArityMismatch(DomainError):
    pass


class InvariantViolation(DomainError):
    pass


class UnboundFeature(DomainError):
    pass
