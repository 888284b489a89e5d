from utils.errors import CmScopeError


class ReportError(CmScopeError):
    """Base class for report errors."""


class EmptyCorpus(ReportError):
    def __init__(self):
        super().__init__("cannot aggregate an empty corpus")


class SchemaError(ReportError):
    """A JSON report that does not follow the documented schema."""
