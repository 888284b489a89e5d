"""
Value types produced by the ingest layer.

Images are immutable after construction and safe to share between
threads and worker processes.
"""

import dataclasses
import hashlib
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

ADDRESS_SPACE = 1 << 32


class SourceFormat(str, Enum):
    RAW = "raw"
    INTEL_HEX = "intel_hex"
    SRECORD = "srecord"


@dataclass(frozen=True)
class Segment:
    start: int
    data: bytes

    def __post_init__(self):
        if not 0 <= self.start < ADDRESS_SPACE:
            raise ValueError(f"segment start out of range: {self.start:#x}")
        if self.start + len(self.data) > ADDRESS_SPACE:
            raise ValueError(f"segment at 0x{self.start:08x} wraps the address space")

    @property
    def end(self) -> int:
        """First address past the segment."""
        return self.start + len(self.data)

    def covers(self, addr: int, size: int = 1) -> bool:
        return self.start <= addr and addr + size <= self.end


@dataclass
class SegmentList:
    """Decoded container contents: data segments plus record metadata."""
    segments: List[Segment] = field(default_factory=list)
    start_address: Optional[int] = None
    header: Optional[str] = None

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __getitem__(self, index: int) -> Segment:
        return self.segments[index]


@dataclass(frozen=True)
class FirmwareImage:
    data: bytes
    base: Optional[int] = None
    fill: int = 0xFF
    source_format: SourceFormat = SourceFormat.RAW
    metadata: Dict[str, str] = field(default_factory=dict)
    # High-address configuration segments (e.g. UICR) kept out of the main span
    aux_segments: Tuple[Segment, ...] = ()

    def __post_init__(self):
        if not self.data:
            raise ValueError("firmware image must not be empty")

    def __len__(self) -> int:
        return len(self.data)

    @property
    def image_id(self) -> str:
        if "path" in self.metadata:
            return self.metadata["path"]
        return hashlib.sha256(self.data).hexdigest()[:16]

    @property
    def profile_id(self) -> Optional[str]:
        return self.metadata.get("profile")

    @property
    def device_id(self) -> Optional[str]:
        return self.metadata.get("device")

    @property
    def declared_base(self) -> Optional[int]:
        """Base a manifest claims for an unplaced image; a candidate, not a fact."""
        value = self.metadata.get("declared_base")
        return None if value is None else int(value, 16)

    @property
    def end(self) -> int:
        return self._require_base() + len(self.data)

    def with_base(self, base: int) -> "FirmwareImage":
        return dataclasses.replace(self, base=base)

    def with_metadata(self, **values: str) -> "FirmwareImage":
        merged = dict(self.metadata)
        merged.update({k: str(v) for k, v in values.items() if v is not None})
        return dataclasses.replace(self, metadata=merged)

    def contains(self, addr: int, size: int = 1) -> bool:
        """True if [addr, addr+size) lies in the main byte span."""
        if self.base is None:
            return False
        return self.base <= addr and addr + size <= self.base + len(self.data)

    def read(self, addr: int, size: int) -> Optional[bytes]:
        """Bytes at an absolute address from the main span or an auxiliary segment."""
        if self.contains(addr, size):
            offset = addr - self.base
            return self.data[offset:offset + size]
        for seg in self.aux_segments:
            if seg.covers(addr, size):
                offset = addr - seg.start
                return seg.data[offset:offset + size]
        return None

    def read_u16(self, addr: int) -> Optional[int]:
        raw = self.read(addr, 2)
        return None if raw is None else struct.unpack("<H", raw)[0]

    def read_u32(self, addr: int) -> Optional[int]:
        raw = self.read(addr, 4)
        return None if raw is None else struct.unpack("<I", raw)[0]

    def word_at_offset(self, offset: int) -> int:
        return struct.unpack_from("<I", self.data, offset)[0]

    def _require_base(self) -> int:
        if self.base is None:
            raise ValueError("image base is unset; infer it first")
        return self.base


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    format: Optional[SourceFormat] = None
    profile: Optional[str] = None
    device: Optional[str] = None
    base: Optional[int] = None


@dataclass(frozen=True)
class CorpusManifest:
    entries: Tuple[ManifestEntry, ...]

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.path in seen:
                raise ValueError(f"duplicate manifest path: {entry.path}")
            seen.add(entry.path)

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def sorted_segments(segments: Sequence[Segment]) -> List[Segment]:
    return sorted(segments, key=lambda s: (s.start, len(s.data)))
