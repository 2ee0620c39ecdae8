"""Exception hierarchy.

Every error raised by the package derives from :class:`MulticatError`.
Numerical failures that the CLI maps to exit code 3 derive from
:class:`NumericalFailure`.
"""


class MulticatError(Exception):
    """Base class for all package errors."""


class NumericalFailure(MulticatError):
    """A computation finished but could not meet its accuracy contract."""


class ClosureOverflow(MulticatError):
    pass


class NonUnitaryGenerator(MulticatError):
    pass


class UnknownGroupName(MulticatError):
    pass


class CutoffTooSmall(MulticatError):
    pass


class DegenerateState(MulticatError):
    pass


class SpaceMismatch(MulticatError):
    pass


class DimensionMismatch(MulticatError):
    pass


class InvalidModePair(MulticatError):
    pass


class NotOneDesign(MulticatError):
    pass


class ProjectorAnnihilatesInput(MulticatError):
    pass


class PhaseGateNotInGroup(MulticatError):
    pass


class TailTooLarge(NumericalFailure):
    pass


class RankCollapse(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    """Raised by the SDP solver when no certificate was reached.

    The best iterate is attached as ``result`` so callers can still
    inspect it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
