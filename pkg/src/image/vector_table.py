import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ingest.model import FirmwareImage

from .errors import InvalidInitialSp, InvalidResetVector, TableTruncated
from .memory_map import MemoryMap, default_memory_map

logger = logging.getLogger(__name__)

MAX_VECTOR_ENTRIES = 512

# Architectural exception numbers, indexed from entry 2
EXCEPTION_NAMES = {
    2: "NMI",
    3: "HardFault",
    4: "MemManage",
    5: "BusFault",
    6: "UsageFault",
    7: "SecureFault",
    11: "SVCall",
    12: "DebugMonitor",
    14: "PendSV",
    15: "SysTick",
}


@dataclass(frozen=True)
class VectorTable:
    initial_sp: int
    reset: int
    handlers: Tuple[int, ...]
    table_address: int

    @property
    def reset_entry(self) -> int:
        return self.reset & ~1

    def entry_points(self) -> List[int]:
        """Reset plus every nonzero handler, Thumb bit stripped, first occurrence order."""
        seen = []
        for value in (self.reset,) + self.handlers:
            if value and (value & ~1) not in seen:
                seen.append(value & ~1)
        return seen

    def handler_name(self, index: int) -> str:
        """Name of vector entry ``index`` (0 = SP, 1 = Reset)."""
        if index == 1:
            return "Reset"
        if index in EXCEPTION_NAMES:
            return EXCEPTION_NAMES[index]
        if index >= 16:
            return f"IRQ{index - 16}"
        return f"Reserved{index}"


def is_valid_sp(value: int, memory_map: Optional[MemoryMap] = None) -> bool:
    memory_map = memory_map or default_memory_map()
    return value != 0 and value & 0x3 == 0 and memory_map.classify(value).is_ram


def is_thumb_pointer(value: int, start: int, end: int) -> bool:
    """Odd value whose even address lies in [start, end)."""
    return value & 1 == 1 and start <= (value & ~1) < end


def parse_vector_table(
    image: FirmwareImage,
    base: Optional[int] = None,
    max_entries: int = MAX_VECTOR_ENTRIES,
    memory_map: Optional[MemoryMap] = None,
) -> VectorTable:
    """
    Read the vector table at the image base.

    Entries after reset are consumed until the first word that is neither
    zero nor a Thumb pointer into the image, or ``max_entries`` words.
    """
    if base is None:
        base = image.base
    if base is None:
        raise ValueError("parse_vector_table needs a base address")
    image = image.with_base(base) if image.base != base else image
    if len(image) < 8:
        raise TableTruncated(f"image of {len(image)} bytes cannot hold a vector table")

    start, end = base, base + len(image)
    initial_sp = image.word_at_offset(0)
    reset = image.word_at_offset(4)
    if not is_valid_sp(initial_sp, memory_map):
        raise InvalidInitialSp(initial_sp)
    if not is_thumb_pointer(reset, start, end):
        raise InvalidResetVector(reset)

    handlers = []
    limit = min(max_entries, len(image) // 4)
    for index in range(2, limit):
        value = image.word_at_offset(index * 4)
        if value != 0 and not is_thumb_pointer(value, start, end):
            break
        handlers.append(value)

    table = VectorTable(initial_sp=initial_sp, reset=reset, handlers=tuple(handlers), table_address=base)
    logger.debug(f"vector table at 0x{base:08x}: sp=0x{initial_sp:08x} reset=0x{reset:08x} "
                 f"{len(handlers)} handler slot(s)")
    return table
