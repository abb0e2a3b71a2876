"""Exception hierarchy shared by every module of the package."""


class CoreEPError(Exception):
    """Base class for all errors raised by :mod:`coreep`."""


class FactorizationFailure(CoreEPError):
    pass


class OverflowFailure(CoreEPError):
    pass


class DecompositionInconsistency(CoreEPError):
    """Eigenvalue split of the Schur form disagrees with ``rank(A^k)``."""


class RouteDisagreement(CoreEPError):
    """Formula and decomposition routes of the core-EP inverse disagree."""


class IndexTooLarge(CoreEPError):
    pass


class PremiseViolated(CoreEPError):
    """A perturbation bound was requested outside its hypotheses.

    The partially filled report (premise values, notes) is attached as
    ``report`` so callers can still serialise it.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotARankJump(CoreEPError):
    pass


class NotStable(CoreEPError):
    pass


class NotSemistable(CoreEPError):
    pass


class Case1Violated(CoreEPError):
    pass


class PerturbedCoreUnstable(CoreEPError):
    pass


class TruncationInsufficient(CoreEPError):
    pass


class ToleranceConflict(CoreEPError):
    """Numerical classification produced a logically impossible outcome."""


class ParseError(CoreEPError):
    pass


class ShapeMismatch(CoreEPError):
    pass
