"""Front door for turning bytes or files into FirmwareImage values."""

import dataclasses
import logging
import os
from typing import Optional, Sequence, Tuple

from .errors import EmptyInput
from .intel_hex import decode_intel_hex
from .merge import DEFAULT_FILL, DEFAULT_MAX_GAP, merge_segments, split_aux_segments
from .model import FirmwareImage, SegmentList, SourceFormat
from .srecord import decode_srecord

logger = logging.getLogger(__name__)


def load_raw(data: bytes, base: Optional[int] = None, fill: int = DEFAULT_FILL) -> FirmwareImage:
    if not data:
        raise EmptyInput("raw image")
    return FirmwareImage(data=bytes(data), base=base, fill=fill, source_format=SourceFormat.RAW)


def detect_format(data: bytes) -> SourceFormat:
    """First non-blank byte ':' means Intel HEX, 'S' means S-record, anything else is raw."""
    head = data.lstrip(b" \t\r\n")[:1]
    if head == b":":
        return SourceFormat.INTEL_HEX
    if head == b"S":
        return SourceFormat.SRECORD
    return SourceFormat.RAW


def load_firmware(
    data: bytes,
    format_hint: Optional[SourceFormat] = None,
    base: Optional[int] = None,
    fill: int = DEFAULT_FILL,
    max_gap: int = DEFAULT_MAX_GAP,
    aux_windows: Sequence[Tuple[int, int]] = (),
) -> FirmwareImage:
    """
    Decode any supported container into an image.

    For HEX and S-record input, ``base`` overrides the lowest segment
    address only when given explicitly. Segments inside ``aux_windows``
    are kept out of the main span and recorded in metadata.
    """
    if not data:
        raise EmptyInput("firmware file")
    fmt = SourceFormat(format_hint) if format_hint else detect_format(data)
    if fmt is SourceFormat.RAW:
        return load_raw(data, base=base, fill=fill)

    text = data.decode("ascii", errors="replace")
    decoded: SegmentList = decode_intel_hex(text) if fmt is SourceFormat.INTEL_HEX else decode_srecord(text)

    main, aux = split_aux_segments(decoded.segments, aux_windows)
    if not main:
        main, aux = aux, []
    image = merge_segments(main, fill=fill, max_gap=max_gap, source_format=fmt)

    metadata = {}
    if decoded.start_address is not None:
        metadata["start_address"] = f"0x{decoded.start_address:08x}"
    if decoded.header:
        metadata["header"] = decoded.header
    if aux:
        metadata["aux_segments"] = ",".join(f"0x{s.start:08x}+{len(s.data):#x}" for s in aux)
        logger.info(f"kept {len(aux)} auxiliary segment(s) outside the main image")

    image = dataclasses.replace(
        image.with_metadata(**metadata),
        base=image.base if base is None else base,
        aux_segments=tuple(aux),
    )
    return image


def load_file(path: str, **kwargs) -> FirmwareImage:
    with open(path, "rb") as handle:
        data = handle.read()
    image = load_firmware(data, **kwargs)
    return image.with_metadata(path=os.fspath(path))
