"""
The fixed Cortex-M physical memory map.

The nested System sub-regions (PPB, SCS) are flattened so the list
tiles the 32-bit address space exactly once.
"""

import bisect
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Tuple


class RegionClass(str, Enum):
    CODE = "Code"
    SRAM = "SRAM"
    PERIPHERAL = "Peripheral"
    RAM_WB = "RAM_WB"
    RAM_WT = "RAM_WT"
    DEVICE_SHARED = "DeviceShared"
    DEVICE_PE = "DevicePE"
    SYSTEM = "System"
    PPB = "PPB"
    SCS = "SCS"

    @property
    def is_ram(self) -> bool:
        return self in RAM_CLASSES


RAM_CLASSES = frozenset({RegionClass.SRAM, RegionClass.RAM_WB, RegionClass.RAM_WT})
XN_CLASSES = frozenset({
    RegionClass.PERIPHERAL,
    RegionClass.DEVICE_SHARED,
    RegionClass.DEVICE_PE,
    RegionClass.SYSTEM,
    RegionClass.PPB,
    RegionClass.SCS,
})


@dataclass(frozen=True)
class MemoryRegion:
    start: int
    end: int  # inclusive
    region_class: RegionClass
    default_xn: bool

    @property
    def size(self) -> int:
        return self.end - self.start + 1

    def __contains__(self, addr: int) -> bool:
        return self.start <= addr <= self.end


@dataclass(frozen=True)
class MemoryMap:
    regions: Tuple[MemoryRegion, ...]

    def __post_init__(self):
        object.__setattr__(self, "_starts", [r.start for r in self.regions])

    def region_for(self, addr: int) -> MemoryRegion:
        if not 0 <= addr <= 0xFFFFFFFF:
            raise ValueError(f"address out of range: {addr:#x}")
        return self.regions[bisect.bisect_right(self._starts, addr) - 1]

    def classify(self, addr: int) -> RegionClass:
        return self.region_for(addr).region_class

    def is_xn(self, addr: int) -> bool:
        return self.region_for(addr).default_xn

    def ram_regions(self) -> Tuple[MemoryRegion, ...]:
        return tuple(r for r in self.regions if r.region_class.is_ram)


_LAYOUT = (
    (0x00000000, 0x1FFFFFFF, RegionClass.CODE),
    (0x20000000, 0x3FFFFFFF, RegionClass.SRAM),
    (0x40000000, 0x5FFFFFFF, RegionClass.PERIPHERAL),
    (0x60000000, 0x7FFFFFFF, RegionClass.RAM_WB),
    (0x80000000, 0x9FFFFFFF, RegionClass.RAM_WT),
    (0xA0000000, 0xBFFFFFFF, RegionClass.DEVICE_SHARED),
    (0xC0000000, 0xDFFFFFFF, RegionClass.DEVICE_PE),
    (0xE0000000, 0xE000DFFF, RegionClass.PPB),
    (0xE000E000, 0xE000EFFF, RegionClass.SCS),
    (0xE000F000, 0xE00FFFFF, RegionClass.PPB),
    (0xE0100000, 0xFFFFFFFF, RegionClass.SYSTEM),
)


@lru_cache(maxsize=1)
def default_memory_map() -> MemoryMap:
    return MemoryMap(tuple(
        MemoryRegion(start, end, cls, cls in XN_CLASSES) for start, end, cls in _LAYOUT
    ))


def classify_address(memory_map: MemoryMap, addr: int) -> RegionClass:
    return memory_map.classify(addr)
