"""Exception hierarchy shared by every cliffpart module."""


class CliffpartError(Exception):
    """Base class for all errors raised by cliffpart."""


class InvalidOrderError(CliffpartError, ValueError):
    """The cyclic order ``n`` is below 2."""


class IncompatibleOrderError(CliffpartError, ValueError):
    """Two phases or monomials of different order were combined."""


class NumericDomainError(CliffpartError, ValueError):
    """An argument lies outside the numeric domain of a formula."""


class InvalidInputError(CliffpartError, ValueError):
    """Malformed input such as a non-permutation or a bad generator label."""


class CapacityError(CliffpartError):
    """A size guard (dense dimension, enumeration count) was exceeded."""

    def __init__(self, what: str, needed: float, limit: float):
        self.what = what
        self.needed = needed
        self.limit = limit
        super().__init__(f"{what}: needs {needed:.6g}, guard is {limit:.6g}")


class RepresentationError(CliffpartError):
    """The matrix representation contradicts the algebra relations.

    Indicates a construction bug (or a deliberately injected fault).
    """


class PreconditionError(CliffpartError, ValueError):
    """An operation's documented precondition does not hold."""


class DomainWarning(UserWarning):
    """A formula was evaluated near or outside its domain; result may be unreliable."""
