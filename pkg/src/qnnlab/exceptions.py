class ConfigError(ValueError):
    """Raised when a requested configuration is invalid (bad qubit count,
    unknown enum value, malformed config file).  Maps to CLI exit code 1."""
