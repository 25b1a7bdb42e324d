"""Exception types raised across the package."""


class FitcertError(Exception):
    """Base class for all errors raised by fitcert."""


class MaskFormatError(FitcertError, ValueError):
    """A mask document could not be parsed."""


class BoundsError(FitcertError, IndexError):
    """A column or row index lies outside the pattern."""


class UndersizedSetError(FitcertError, ValueError):
    """An observation set has at most ``r`` entries and carries no information."""


class CapacityError(FitcertError, RuntimeError):
    """A search would exceed its enumeration cap."""

    def __init__(self, message: str, cap: int):
        super().__init__(message)
        self.cap = cap


class DegeneracyError(FitcertError, ValueError):
    """A basis has a numerically singular row block."""

    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


class GenerationError(FitcertError, RuntimeError):
    """Random generation ran out of retries."""


class ShapeError(FitcertError, ValueError):
    """Inputs have mismatched dimensions."""


class AssumptionError(FitcertError, ValueError):
    """A pattern breaks a precondition of the combinatorial tests."""


class EngineDisagreement(FitcertError, AssertionError):
    """The brute-force and matching engines returned different verdicts."""
