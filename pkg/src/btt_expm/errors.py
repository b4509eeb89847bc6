"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates the subgenerator sign or row-sum conditions."""


class NumericalError(ArithmeticError):
    """A computation failed an internal consistency or convergence check."""


class ParseError(ValueError):
    """A file or command-line value could not be parsed."""
