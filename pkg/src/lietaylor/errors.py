"""Exception hierarchy shared by all modules."""


class TaylorError(Exception):
    """Base class for every error raised by lietaylor."""


class OrderMismatch(TaylorError, ValueError):
    """Two series with different nonzero orders were combined."""

    def __init__(self, left, right):
        super().__init__(f"cannot combine series of orders {left} and {right}")
        self.orders = (left, right)


class DivisionByZeroConstantTerm(TaylorError, ZeroDivisionError):
    """Series division with a divisor whose constant term is exactly zero."""


class DomainError(TaylorError, ValueError):
    """An elementary function was applied outside its domain.

    ``instruction`` is filled in by the tape interpreter when the failure
    happens while running a code list.
    """

    def __init__(self, function, value, instruction=None):
        self.function = function
        self.value = value
        self.instruction = instruction
        msg = f"{function}: argument with constant term {value!r} is outside the domain"
        if instruction is not None:
            msg += f" (instruction {instruction})"
        super().__init__(msg)


class NonFiniteCoefficient(TaylorError, ArithmeticError):
    """A Taylor coefficient is NaN or infinite."""


class ShapeMismatch(TaylorError, ValueError):
    """Array shapes are incompatible for the requested operation."""


# Raised by the Lie drivers when a field's output has the wrong shape.
ShapeError = ShapeMismatch


class IndexOutOfBounds(TaylorError, IndexError):
    """Index outside the extent of a TaylorArray axis."""


class SingularConstantTerm(TaylorError, ArithmeticError):
    """The constant-term matrix of a series linear solve is singular."""


class UnsupportedOperation(TaylorError, TypeError):
    """Operation that cannot be recorded on a code list (branching, abs, ...)."""

    def __init__(self, name):
        super().__init__(f"operation {name!r} is not supported on traced values")
        self.name = name
