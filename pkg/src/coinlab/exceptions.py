class CoinError(Exception):
    """Base class for errors raised by coinlab."""


class DomainError(CoinError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigurationError(CoinError, ValueError):
    """An experiment configuration is invalid.

    ``field`` names the offending configuration key when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
