"""
Motorola S-record decoding and encoding.

Checksum is the one's complement of the low byte of the sum of the
count, address and data bytes.
"""

import binascii
import logging
from typing import Iterable, List, Optional, Tuple

from .errors import BadChecksum, BadRecordType, EmptyInput, OverlappingSegments, TruncatedRecord
from .model import Segment, SegmentList

logger = logging.getLogger(__name__)

# record type -> address width in bytes
ADDRESS_WIDTH = {
    "0": 2, "1": 2, "2": 3, "3": 4,
    "5": 2, "6": 3,
    "7": 4, "8": 3, "9": 2,
}
DATA_RECORDS = {"1", "2", "3"}
START_RECORDS = {"7", "8", "9"}
DATA_PER_RECORD = 32


def srecord_checksum(payload: bytes) -> int:
    return 0xFF - (sum(payload) & 0xFF)


def decode_srecord(text: str) -> SegmentList:
    if not text or not text.strip():
        raise EmptyInput("S-record text")

    records: List[Tuple[int, bytes, int]] = []
    start_address: Optional[int] = None
    header: Optional[str] = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        if len(line) < 2 or line[0] != "S":
            raise TruncatedRecord(line_no, "record does not start with 'S'")
        rtype = line[1]
        if rtype not in ADDRESS_WIDTH:
            raise BadRecordType(line_no, f"S{rtype}")
        try:
            body = binascii.unhexlify(line[2:])
        except (binascii.Error, ValueError):
            raise TruncatedRecord(line_no, "invalid hex digits")
        if not body:
            raise TruncatedRecord(line_no)
        count = body[0]
        width = ADDRESS_WIDTH[rtype]
        if len(body) != count + 1 or count < width + 1:
            raise TruncatedRecord(line_no, f"byte count {count} does not match record length")
        if srecord_checksum(body[:-1]) != body[-1]:
            raise BadChecksum(line_no)

        address = int.from_bytes(body[1:1 + width], "big")
        data = body[1 + width:-1]
        if rtype == "0":
            header = data.decode("ascii", errors="replace")
        elif rtype in DATA_RECORDS:
            if data:
                records.append((address, data, line_no))
        elif rtype in START_RECORDS:
            start_address = address
        # S5/S6 carry record counts only

    return SegmentList(segments=_coalesce(records), start_address=start_address, header=header)


def _coalesce(records: List[Tuple[int, bytes, int]]) -> List[Segment]:
    """Merge contiguous records into segments, rejecting overlaps."""
    segments: List[Segment] = []
    cur_start = None
    cur = bytearray()
    for address, data, line_no in sorted(records, key=lambda r: r[0]):
        if cur_start is not None:
            cur_end = cur_start + len(cur)
            if address < cur_end:
                raise OverlappingSegments(address, line_no)
            if address == cur_end:
                cur.extend(data)
                continue
            segments.append(Segment(cur_start, bytes(cur)))
        cur_start = address
        cur = bytearray(data)
    if cur_start is not None:
        segments.append(Segment(cur_start, bytes(cur)))
    return segments


def encode_srecord(segments: Iterable[Segment], header: str = "cm-scope", start_address: int = 0) -> str:
    """Render segments as S-records, picking the narrowest address form that fits."""
    segments = list(segments)
    top = max((seg.end for seg in segments), default=0)
    if top <= 0x10000:
        data_type, end_type = "1", "9"
    elif top <= 0x1000000:
        data_type, end_type = "2", "8"
    else:
        data_type, end_type = "3", "7"

    lines = [_record("0", 0, header.encode("ascii"))]
    count = 0
    for seg in segments:
        for offset in range(0, len(seg.data), DATA_PER_RECORD):
            lines.append(_record(data_type, seg.start + offset, seg.data[offset:offset + DATA_PER_RECORD]))
            count += 1
    if count <= 0xFFFF:
        lines.append(_record("5", count, b""))
    lines.append(_record(end_type, start_address, b""))
    return "\n".join(lines) + "\n"


def _record(rtype: str, address: int, data: bytes) -> str:
    width = ADDRESS_WIDTH[rtype]
    payload = bytes([width + len(data) + 1]) + address.to_bytes(width, "big") + data
    return f"S{rtype}{payload.hex().upper()}{srecord_checksum(payload):02X}"
