"""Exception types shared across the library."""


class VroptError(Exception):
    """Base class for all library errors."""


class ConfigError(VroptError):
    """Invalid configuration (bad algorithm parameters, empty dataset, ...)."""


class ContractError(VroptError):
    """A caller violated an operation precondition (index range, sizes)."""


class NumericError(VroptError):
    """Non-finite values where finite ones are required."""


class ParseError(VroptError):
    """Malformed dataset input.  Carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class DivergenceError(VroptError):
    """An optimizer iterate blew up.  Carries the offending iteration."""

    def __init__(self, message, iteration):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration


class DescentViolation(VroptError):
    """First update with a snapshot gradient failed to decrease the objective."""
