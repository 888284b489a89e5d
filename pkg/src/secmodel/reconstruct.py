"""Replay of MPU register writes into an MpuConfig."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .errors import InvalidConfig, UnknownRegister
from .mpu import MpuArch, MpuConfig, MpuRegion

logger = logging.getLogger(__name__)

MPU_TYPE = 0xE000ED90
MPU_CTRL = 0xE000ED94
MPU_RNR = 0xE000ED98
MPU_RBAR = 0xE000ED9C
MPU_RASR = 0xE000EDA0  # MPU_RLAR on v8m
MPU_RLAR = MPU_RASR
MPU_ALIASES = {
    0xE000EDA4: (1, "rbar"), 0xE000EDA8: (1, "attr"),
    0xE000EDAC: (2, "rbar"), 0xE000EDB0: (2, "attr"),
    0xE000EDB4: (3, "rbar"), 0xE000EDB8: (3, "attr"),
}
MPU_MAIR0 = 0xE000EDC0
MPU_MAIR1 = 0xE000EDC4
MPU_WINDOW = (MPU_TYPE, MPU_MAIR1 + 3)
MPU_NS_WINDOW = (0xE002ED90, 0xE002EDC7)

CTRL_ENABLE = 1 << 0
CTRL_HFNMIENA = 1 << 1
CTRL_PRIVDEFENA = 1 << 2


@dataclass(frozen=True)
class MpuWrite:
    address: int
    value: int


WriteLike = Union[MpuWrite, Tuple[int, int]]


def in_mpu_window(address: int) -> bool:
    return MPU_WINDOW[0] <= address <= MPU_WINDOW[1]


def in_ns_alias_window(address: int) -> bool:
    return MPU_NS_WINDOW[0] <= address <= MPU_NS_WINDOW[1]


class _RegisterFile:
    def __init__(self, arch: MpuArch, max_regions: int):
        self.arch = arch
        self.max_regions = max_regions
        self.ctrl = 0
        self.rnr = 0
        self.rbar: Dict[int, int] = {}
        self.attr: Dict[int, int] = {}  # RASR (v7m) or RLAR (v8m)

    def _region(self, number: int) -> int:
        if not 0 <= number < self.max_regions:
            raise InvalidConfig(f"region number {number} out of range (max {self.max_regions})")
        return number

    def write(self, address: int, value: int) -> None:
        value &= 0xFFFFFFFF
        if address == MPU_CTRL:
            self.ctrl = value
        elif address == MPU_RNR:
            self.rnr = self._region(value & 0xFF)
        elif address == MPU_RBAR:
            self._write_rbar(self.rnr, value)
        elif address == MPU_RASR:
            self.attr[self._region(self.rnr)] = value
        elif address in MPU_ALIASES:
            n, which = MPU_ALIASES[address]
            # v7m aliases address the current region; v8m aliases step from the RNR group
            region = self.rnr if self.arch is MpuArch.V7M else (self.rnr & ~3) + n
            if which == "rbar":
                self._write_rbar(region, value)
            else:
                self.attr[self._region(region)] = value
        elif address in (MPU_TYPE, MPU_MAIR0, MPU_MAIR1):
            logger.debug(f"ignoring write to 0x{address:08x}")
        else:
            raise UnknownRegister(address)

    def _write_rbar(self, region: int, value: int) -> None:
        if self.arch is MpuArch.V7M and value & 0x10:
            self.rnr = region = self._region(value & 0xF)
        self.rbar[self._region(region)] = value

    def config(self, pxn_supported: bool) -> MpuConfig:
        regions = []
        for number in sorted(set(self.rbar) | set(self.attr)):
            rbar, attr = self.rbar.get(number, 0), self.attr.get(number, 0)
            if self.arch is MpuArch.V7M:
                size = 1 << (((attr >> 1) & 0x1F) + 1)
                regions.append(MpuRegion.v7m(
                    number,
                    base=rbar & ~0x1F,
                    size=size,
                    ap=(attr >> 24) & 0x7,
                    xn=bool(attr & (1 << 28)),
                    subregion_disable=(attr >> 8) & 0xFF,
                    enabled=bool(attr & 1),
                ))
            else:
                regions.append(MpuRegion.v8m(
                    number,
                    base=rbar & ~0x1F,
                    limit=(attr & ~0x1F) | 0x1F,
                    ap=(rbar >> 1) & 0x3,
                    xn=bool(rbar & 1),
                    pxn=bool(attr & (1 << 4)),
                    enabled=bool(attr & 1),
                ))
        return MpuConfig(
            regions=tuple(regions),
            enable=bool(self.ctrl & CTRL_ENABLE),
            privileged_default=bool(self.ctrl & CTRL_PRIVDEFENA),
            hfnmi_enable=bool(self.ctrl & CTRL_HFNMIENA),
            max_regions=self.max_regions,
            pxn_supported=pxn_supported,
            arch=self.arch,
        )


def reconstruct_mpu_config(write_log: Iterable[WriteLike], arch: Union[MpuArch, str] = MpuArch.V7M,
                           max_regions: Optional[int] = None, pxn_supported: bool = False) -> MpuConfig:
    """
    Replay ``write_log`` in order against a reset MPU register file.

    Writes to the non-secure alias window are logged and skipped. Any
    other address outside the MPU block raises UnknownRegister.
    """
    arch = MpuArch(arch)
    registers = _RegisterFile(arch, max_regions or (8 if arch is MpuArch.V7M else 16))
    for entry in write_log:
        address, value = (entry.address, entry.value) if isinstance(entry, MpuWrite) else entry
        if in_ns_alias_window(address):
            logger.info(f"skipping non-secure MPU alias write 0x{address:08x} = 0x{value:08x}")
            continue
        registers.write(address, value)
    return registers.config(pxn_supported)


def canonical_write_log(cfg: MpuConfig) -> List[MpuWrite]:
    """A minimal write sequence that reconstructs ``cfg``."""
    log = []
    for region in sorted(cfg.regions, key=lambda r: r.number):
        log.append(MpuWrite(MPU_RNR, region.number))
        if cfg.arch is MpuArch.V7M:
            size_field = region.size.bit_length() - 2
            log.append(MpuWrite(MPU_RBAR, region.base))
            log.append(MpuWrite(MPU_RASR,
                                (int(region.xn) << 28) | (region.ap << 24)
                                | (region.subregion_disable << 8) | (size_field << 1) | int(region.enabled)))
        else:
            log.append(MpuWrite(MPU_RBAR, region.base | (region.ap << 1) | int(region.xn)))
            log.append(MpuWrite(MPU_RLAR, (region.limit & ~0x1F) | (int(region.pxn) << 4) | int(region.enabled)))
    ctrl = (CTRL_ENABLE if cfg.enable else 0) | (CTRL_HFNMIENA if cfg.hfnmi_enable else 0) \
        | (CTRL_PRIVDEFENA if cfg.privileged_default else 0)
    log.append(MpuWrite(MPU_CTRL, ctrl))
    return log
