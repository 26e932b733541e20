"""Exception types shared across the package.

Two failure categories are distinguished so the command line tool can map
them onto distinct exit codes: bad user input versus a numerical identity
or precondition that did not hold at runtime.
"""


class ConfigError(ValueError):
    """Invalid configuration, argument, or input shape."""


class NumericalCheckError(RuntimeError):
    """A numerical precondition or consistency check failed."""
