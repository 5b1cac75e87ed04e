"""Exception hierarchy shared by the library and the CLI."""


class ActClustError(Exception):
    """Base class for all library errors."""


class InputError(ActClustError, ValueError):
    """Malformed or out-of-range input."""


class ValidationError(InputError):
    """Structurally valid input that violates a domain invariant."""


class ParseError(InputError):
    """A file could not be parsed; the message names the offending field."""


class InfeasibleError(ActClustError):
    """No partition satisfies the actionability constraint."""


class RefusalError(ActClustError):
    """An exhaustive routine was asked to run above its size guard."""
