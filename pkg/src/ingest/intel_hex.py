"""Intel HEX decoding and encoding on top of the ``intelhex`` package."""

import io
import logging
from typing import Iterable

from intelhex import (
    AddressOverlapError,
    HexReaderError,
    IntelHex,
    RecordChecksumError,
    RecordTypeError,
)

from .errors import BadChecksum, BadRecordType, EmptyInput, OverlappingSegments, TruncatedRecord
from .model import Segment, SegmentList, sorted_segments

logger = logging.getLogger(__name__)


def decode_intel_hex(text: str) -> SegmentList:
    """
    Decode Intel HEX text into sorted, coalesced segments.

    Record types 00, 01, 02, 03, 04 and 05 are honored; start-address
    records end up in ``start_address`` and never produce data.
    """
    if not text or not text.strip():
        raise EmptyInput("Intel HEX text")

    ih = IntelHex()
    try:
        ih.loadhex(io.StringIO(text))
    except RecordChecksumError as e:
        raise BadChecksum(_line_of(e)) from e
    except RecordTypeError as e:
        raise BadRecordType(_line_of(e)) from e
    except AddressOverlapError as e:
        raise OverlappingSegments(getattr(e, "address", 0), _line_of(e)) from e
    except HexReaderError as e:
        # length mismatches, odd digit counts, missing ':' and bad address records
        raise TruncatedRecord(_line_of(e), str(e)) from e

    segments = [Segment(start, ih.gets(start, stop - start)) for start, stop in ih.segments()]
    result = SegmentList(segments=sorted_segments(segments), start_address=_start_address(ih))
    logger.debug(f"decoded {len(result)} Intel HEX segment(s)")
    return result


def encode_intel_hex(segments: Iterable[Segment]) -> str:
    """Render segments as Intel HEX text terminated by an EOF record."""
    ih = IntelHex()
    for seg in segments:
        ih.puts(seg.start, bytes(seg.data))
    out = io.StringIO()
    ih.write_hex_file(out, write_start_addr=False)
    return out.getvalue()


def _line_of(error: Exception) -> int:
    return int(getattr(error, "line", 0) or 0)


def _start_address(ih: IntelHex):
    start = ih.start_addr
    if not start:
        return None
    if "EIP" in start:
        return start["EIP"]
    return (start.get("CS", 0) << 4) + start.get("IP", 0)
