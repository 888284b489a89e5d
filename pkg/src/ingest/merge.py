import logging
from typing import Iterable, List, Sequence, Tuple

from .errors import EmptyInput, GapTooLarge, OverlappingSegments
from .model import FirmwareImage, Segment, SourceFormat, sorted_segments

logger = logging.getLogger(__name__)

DEFAULT_FILL = 0xFF
DEFAULT_MAX_GAP = 16 * 1024 * 1024


def merge_segments(
    segs: Iterable[Segment],
    fill: int = DEFAULT_FILL,
    max_gap: int = DEFAULT_MAX_GAP,
    source_format: SourceFormat = SourceFormat.RAW,
) -> FirmwareImage:
    """
    Flatten segments into one contiguous image based at the lowest start.

    Gaps between segments are padded with ``fill``; a single gap larger
    than ``max_gap`` raises GapTooLarge.
    """
    ordered = [s for s in sorted_segments(list(segs)) if s.data]
    if not ordered:
        raise EmptyInput("segment list")

    base = ordered[0].start
    out = bytearray()
    cursor = base
    for seg in ordered:
        if seg.start < cursor:
            raise OverlappingSegments(seg.start)
        gap = seg.start - cursor
        if gap > max_gap:
            raise GapTooLarge(cursor, gap, max_gap)
        out.extend(bytes([fill]) * gap)
        out.extend(seg.data)
        cursor = seg.end

    logger.debug(f"merged {len(ordered)} segment(s) into {len(out)} bytes at 0x{base:08x}")
    return FirmwareImage(data=bytes(out), base=base, fill=fill, source_format=source_format)


def split_aux_segments(
    segs: Sequence[Segment], windows: Sequence[Tuple[int, int]]
) -> Tuple[List[Segment], List[Segment]]:
    """
    Separate bytes inside auxiliary windows (inclusive ends) from the rest.

    Returns (main, aux). A segment straddling a window edge is cut.
    """
    main: List[Segment] = []
    aux: List[Segment] = []
    for seg in segs:
        pieces = [seg]
        for lo, hi in windows:
            next_pieces = []
            for piece in pieces:
                cut_lo = max(piece.start, lo)
                cut_hi = min(piece.end, hi + 1)
                if cut_lo >= cut_hi:
                    next_pieces.append(piece)
                    continue
                if piece.start < cut_lo:
                    next_pieces.append(Segment(piece.start, piece.data[:cut_lo - piece.start]))
                aux.append(Segment(cut_lo, piece.data[cut_lo - piece.start:cut_hi - piece.start]))
                if cut_hi < piece.end:
                    next_pieces.append(Segment(cut_hi, piece.data[cut_hi - piece.start:]))
            pieces = next_pieces
        main.extend(pieces)
    return sorted_segments(main), sorted_segments(aux)
