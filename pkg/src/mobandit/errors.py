"""Exception types shared across the package."""


class MobanditError(Exception):
    """Base class for all package-specific errors."""


class DuplicateMaximum(MobanditError):
    """Two arms tie exactly for the maximum of an objective in strict mode."""

    def __init__(self, objective: int):
        self.objective = objective
        super().__init__(f"objective {objective} has no unique best arm")


class InvalidShape(MobanditError):
    pass


class ParseError(MobanditError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ShapeMismatch(MobanditError):
    pass


class BestArmArgument(MobanditError):
    """A per-pair operation was asked about (i, m) with i the best arm of m."""


class DegenerateDenominator(MobanditError):
    """A gradient or linearization was requested where w_i + w_best = 0."""


class TooManyArms(MobanditError):
    pass


class LPInfeasible(MobanditError):
    """The LP solver reported a non-optimal status where one cannot occur."""


class UnvisitedArm(MobanditError):
    pass


class ArmMismatch(MobanditError):
    pass


class NotInitialized(MobanditError):
    """A policy was queried before every arm had been pulled once."""


class CapExceeded(MobanditError):
    def __init__(self, pulls: int, cap: int):
        self.pulls = pulls
        self.cap = cap
        super().__init__(f"pull budget exceeded: {pulls} > {cap}")
