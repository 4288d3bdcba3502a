"""Exception hierarchy shared by all modules."""


class MarkovScopeError(Exception):
    """Base class for errors raised by markovscope."""


class ShapeError(MarkovScopeError, ValueError):
    """Dimensions of operands do not fit together."""


class DomainError(MarkovScopeError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class CapacityError(MarkovScopeError, ValueError):
    """Requested dimension exceeds the configured maximum."""


class NumericError(MarkovScopeError, ArithmeticError):
    """A numerical routine failed to converge."""


class StateValidationError(DomainError):
    """A matrix is not a valid density matrix.

    ``invariant`` names the violated condition (``hermitian``, ``psd``,
    ``trace``, ``finite``, ``shape``).
    """

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant
