"""
Firmware ingest.

Decodes raw binaries, Intel HEX and Motorola S-records into normalized
FirmwareImage values and enumerates corpora for batch analysis.
"""

from .corpus import CorpusError, load_entry, load_manifest, parse_manifest, walk_corpus
from .errors import (
    BadChecksum,
    BadRecordType,
    EmptyInput,
    GapTooLarge,
    IngestError,
    ManifestError,
    OverlappingSegments,
    TruncatedRecord,
)
from .intel_hex import decode_intel_hex, encode_intel_hex
from .loader import detect_format, load_file, load_firmware, load_raw
from .merge import merge_segments, split_aux_segments
from .model import CorpusManifest, FirmwareImage, ManifestEntry, Segment, SegmentList, SourceFormat
from .srecord import decode_srecord, encode_srecord

__all__ = [
    "BadChecksum",
    "BadRecordType",
    "CorpusError",
    "CorpusManifest",
    "EmptyInput",
    "FirmwareImage",
    "GapTooLarge",
    "IngestError",
    "ManifestEntry",
    "ManifestError",
    "OverlappingSegments",
    "Segment",
    "SegmentList",
    "SourceFormat",
    "TruncatedRecord",
    "decode_intel_hex",
    "decode_srecord",
    "detect_format",
    "encode_intel_hex",
    "encode_srecord",
    "load_entry",
    "load_file",
    "load_firmware",
    "load_manifest",
    "load_raw",
    "merge_segments",
    "parse_manifest",
    "split_aux_segments",
    "walk_corpus",
]
