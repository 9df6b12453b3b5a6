"""Exception hierarchy shared by every module."""


class QhesError(Exception):
    """Base class for all errors raised by this package."""


class LayoutError(QhesError):
    """Register layout mismatch: unknown group, bad index, wrong pattern length."""


class ValidationError(QhesError):
    """A value violates a documented invariant (non-unitary block, bad dimensions)."""


class ConfigError(ValidationError):
    """A parameter bundle failed validation."""


class CapacityError(ConfigError):
    """A counting register is too small for the requested number of rounds."""


class ResourceError(QhesError):
    """The requested simulation exceeds the configured qubit cap."""


class DomainError(ValidationError):
    """An argument lies outside the domain of a function."""


class DegenerateInputError(QhesError):
    """Post-selection found zero probability on the requested outcome."""


class ParseError(QhesError):
    """Malformed Hamiltonian or configuration text.

    ``line`` and ``column`` are 1-based; either may be ``None`` when the
    position is unknown.
    """

    def __init__(self, message, line=None, column=None, token=None):
        self.line = line
        self.column = column
        self.token = token
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        if token is not None and repr(str(token)) not in message:
            message += f" (at {str(token)!r})"
        super().__init__(where + message)
