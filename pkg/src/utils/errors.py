"""Root of the cm-scope exception hierarchy."""


class CmScopeError(Exception):
    """Base class for every error raised by cm-scope."""
