"""Errors raised while decoding firmware containers and manifests."""

from typing import Optional

from utils.errors import CmScopeError


class IngestError(CmScopeError):
    """Base class for ingest failures."""


class EmptyInput(IngestError):
    def __init__(self, what: str = "input"):
        super().__init__(f"empty {what}")


class _LineError(IngestError):
    reason = "malformed record"

    def __init__(self, line: int, detail: Optional[str] = None):
        self.line = line
        message = f"{self.reason} at line {line}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class BadChecksum(_LineError):
    reason = "bad checksum"


class BadRecordType(_LineError):
    reason = "bad record type"


class TruncatedRecord(_LineError):
    reason = "truncated or malformed record"


class OverlappingSegments(IngestError):
    def __init__(self, address: int, line: Optional[int] = None):
        self.address = address
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"segments overlap at 0x{address:08x}{where}")


class GapTooLarge(IngestError):
    def __init__(self, start: int, gap: int, limit: int):
        self.start = start
        self.gap = gap
        self.limit = limit
        super().__init__(f"gap of {gap:#x} bytes after 0x{start:08x} exceeds cap {limit:#x}")


class ManifestError(IngestError):
    """The corpus manifest cannot be used at all."""
