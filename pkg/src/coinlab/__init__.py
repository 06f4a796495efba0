"""coinlab: a simulation lab for designing collectives of learning agents."""
__version__ = "0.1.0"

from .core import WeekState, Worldline, WorldUtility, clamp, clamp_set, wlu  # noqa: E402
from .exceptions import CoinError, ConfigurationError, DomainError  # noqa: E402

__all__ = [
    "WeekState", "Worldline", "WorldUtility", "clamp", "clamp_set", "wlu",
    "CoinError", "ConfigurationError", "DomainError", "__version__",
]
