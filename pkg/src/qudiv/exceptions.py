"""Exception types raised by the toolkit."""


class InvalidDimensionError(ValueError):
    """A dimension argument is out of the supported range."""


class PairingError(ValueError):
    """Two measurement descriptions cannot be paired outcome by outcome."""


class EmptyBatchError(ValueError):
    """A sample batch with zero states was requested or supplied."""


class NumericalInconsistencyError(ArithmeticError):
    """A quantity that must be real/normalized/bounded came out otherwise.

    Raised when a computed value violates an exact algebraic contract by
    more than the accumulated-roundoff tolerance, which signals a broken
    construction rather than statistical noise.
    """


class NotMaximallyEntangledError(ValueError):
    """A joint pure state required to be maximally entangled is not."""


class UnsupportedOutcomeCountError(ValueError):
    """An operation requires a specific number of measurement outcomes."""
