"""Exception hierarchy shared by every zklab module."""


class ZklabError(Exception):
    """Base class for all zklab errors."""


class ConfigurationError(ZklabError, ValueError):
    """Mismatched widths, wires, roles or shapes."""


class DomainError(ZklabError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegreeMismatchError(ConfigurationError):
    """Field elements from different extension degrees were combined."""


class EnumerationLimitError(ZklabError):
    """An exhaustive enumeration would exceed the configured cap."""


class BudgetExceededError(ZklabError):
    """A query algorithm made (or declares) more oracle calls than its budget."""


class ProtocolOrderError(ZklabError):
    """A party was asked to move out of turn."""


class NotOracleRepresentableError(ZklabError):
    """The verifier is randomized and cannot be exposed as a function oracle."""


class NotConstructibleError(ZklabError):
    """A requested object cannot be built from the given inputs."""


class WrongShapeError(ConfigurationError):
    """An object built for one protocol shape was passed where another is needed."""
