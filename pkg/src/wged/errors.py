"""Exception hierarchy shared by the numerical and statistical modules."""


class WgedError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(WgedError, ValueError):
    """An argument lies outside the domain of the function."""


class BracketError(DomainError):
    """A root-finding bracket does not straddle a sign change."""


class NoInteriorModeError(DomainError):
    """The density has no interior maximum (boundary mode at zero)."""


class ConvergenceError(WgedError, RuntimeError):
    """An iterative procedure exhausted its budget without converging."""


class SingularMatrixError(WgedError, ArithmeticError):
    """Matrix inversion attempted on a (numerically) singular matrix."""

    def __init__(self, det, msg=None):
        self.det = det
        super().__init__(msg or f"matrix is singular (det={det!r})")


class SeriesOverflowError(WgedError, OverflowError):
    """A series term exceeds the representable floating point range."""


class DataError(WgedError, ValueError):
    """Input data could not be parsed or failed validation."""

    def __init__(self, msg, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            msg = f"line {lineno}: {msg}"
        super().__init__(msg)
