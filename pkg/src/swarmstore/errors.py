"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ConfigurationError -> 2,
OSError -> 3, AccountingError -> 4.
"""


class SwarmStoreError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(SwarmStoreError):
    """Invalid configuration detected before a simulation starts."""


class ScenarioSyntaxError(ConfigurationError):
    """Scenario file line that cannot be parsed as `key = value`."""


class UnknownKeyError(ConfigurationError):
    """Scenario file key that is not part of the documented schema."""


class InvalidValueError(ConfigurationError):
    """Scenario value that parses but violates an invariant."""


class AccountingError(SwarmStoreError):
    """Internal bookkeeping invariant violated; indicates a bug, not bad input."""
