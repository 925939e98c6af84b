"""Exception types shared across the package."""


class LevcoolError(Exception):
    """Base class for all package errors."""


class ConfigError(LevcoolError, ValueError):
    """Invalid configuration input.

    Parameters
    ----------
    code : str
        Machine-readable category, e.g. ``"parse_error"`` or ``"missing_key"``.
    message : str
        Human-readable description.
    line : int, optional
        1-based source line the error refers to, if any.
    key : str, optional
        Configuration key involved, if any.
    """

    def __init__(self, code: str, message: str, line: int | None = None,
                 key: str | None = None):
        self.code = code
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"[{code}] {prefix}{message}")


class NumericalError(LevcoolError, ArithmeticError):
    """A numerical procedure failed (no convergence, singular system, ...)."""

    def __init__(self, message: str, **diagnostics):
        self.diagnostics = diagnostics
        super().__init__(message)
