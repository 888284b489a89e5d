from utils.errors import CmScopeError


class ConfigError(CmScopeError):
    """Base class for configuration data problems."""


class ProfileError(ConfigError):
    pass


class PatternError(ConfigError):
    pass
