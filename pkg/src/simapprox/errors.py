"""Exception hierarchy.

Two families matter to callers: :class:`PrecisionError` (the numerics ran
out of room, retry with more bits) and :class:`ContractViolation` (a fact
that should hold mathematically did not, which means a bug or a
counterexample).  Everything else is bad input.
"""


class SimApproxError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SimApproxError, ValueError):
    pass


class PrecisionError(SimApproxError):
    """Raised when a certified decision needs more precision than allowed."""

    def __init__(self, message, width=None, bits=None):
        super().__init__(message)
        self.width = width
        self.bits = bits


class PrecisionExhausted(PrecisionError):
    pass


class RoundingUnresolved(PrecisionError):
    pass


class FloorUnresolved(PrecisionError):
    pass


class TieUnresolved(PrecisionError):
    def __init__(self, message, first=None, second=None, bits=None):
        super().__init__(message, bits=bits)
        self.first = first
        self.second = second


class ContractViolation(SimApproxError):
    """A check guaranteed by the underlying mathematics failed.

    ``payload`` holds a JSON-serialisable reproduction: the inputs and the
    exact intermediate values that exposed the failure.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload or {}


class SearchExhausted(ContractViolation):
    pass


class NegativeInput(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class DimensionMismatch(InputError):
    pass


class HypothesisUnmet(InputError):
    pass


class DegenerateXi(InputError):
    pass


class AmbiguousRootCount(InputError):
    pass


class NoPositiveRoot(InputError):
    pass
