"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EstimationError(RuntimeError):
    """A statistical fit cannot be carried out on the given sample."""


class NumericError(ArithmeticError):
    """A computation would overflow or otherwise lose meaning."""


class ParseError(ValueError):
    """An input file violates its declared schema."""
