"""Exception hierarchy shared by every module of the package."""


class TVFixError(Exception):
    """Base class for all errors raised by tvfixpoint."""


class ParameterError(TVFixError, ValueError):
    """An argument is outside its admissible range or has the wrong shape."""


class ConfigError(TVFixError, ValueError):
    """A scenario configuration is unknown, incomplete or inconsistent."""


class UnsupportedOperation(TVFixError, NotImplementedError):
    """The requested oracle (gradient, prox, subproblem) is not available."""


class NumericalError(TVFixError, ArithmeticError):
    """A computation produced non-finite values."""


class DivergenceError(NumericalError):
    """An iteration left the finite range; ``step`` is the 1-based index."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ContractError(TVFixError, RuntimeError):
    """A declared operator property was violated at run time."""


class OracleFailure(TVFixError, RuntimeError):
    """The reference solver hit its iteration cap before reaching tolerance."""
