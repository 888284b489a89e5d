"""
MPU access evaluation for the Armv7-M (PMSAv7) and Armv8-M (PMSAv8)
programming models.

Access-permission encodings are kept as explicit tables. Rights are
strings over ``r``/``w``; execute rights are derived from read rights
and the XN/PXN attributes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

from image.memory_map import MemoryMap, default_memory_map

from .errors import InvalidConfig


class MpuArch(str, Enum):
    V7M = "v7m"
    V8M = "v8m"


class Privilege(str, Enum):
    PRIVILEGED = "privileged"
    UNPRIVILEGED = "unprivileged"


class Access(str, Enum):
    READ = "read"
    WRITE = "write"
    EXECUTE = "execute"


class Decision(str, Enum):
    ALLOW = "allow"
    DENY = "deny"

    @classmethod
    def of(cls, allowed: bool) -> "Decision":
        return cls.ALLOW if allowed else cls.DENY


# AP code -> (privileged rights, unprivileged rights)
V7M_AP: Dict[int, Tuple[str, str]] = {
    0b000: ("", ""),
    0b001: ("rw", ""),
    0b010: ("rw", "r"),
    0b011: ("rw", "rw"),
    0b101: ("r", ""),
    0b110: ("r", "r"),
    0b111: ("r", "r"),  # alias of 0b110
}
V8M_AP: Dict[int, Tuple[str, str]] = {
    0b00: ("rw", ""),
    0b01: ("rw", "rw"),
    0b10: ("r", ""),
    0b11: ("r", "r"),
}
AP_TABLES = {MpuArch.V7M: V7M_AP, MpuArch.V8M: V8M_AP}

AP_SYMBOLS: Dict[MpuArch, Dict[str, int]] = {
    MpuArch.V7M: {
        "no/no": 0b000, "rw/no": 0b001, "rw/ro": 0b010,
        "rw/rw": 0b011, "ro/no": 0b101, "ro/ro": 0b110,
    },
    MpuArch.V8M: {
        "rw-priv": 0b00, "rw-any": 0b01, "ro-priv": 0b10, "ro-any": 0b11,
    },
}

MIN_REGION_SIZE = 32
SUBREGION_MIN_SIZE = 256


def parse_ap(arch: MpuArch, value) -> int:
    """AP code from an int or its symbolic name."""
    if isinstance(value, int):
        return value
    arch = MpuArch(arch)
    symbols = AP_SYMBOLS[arch]
    key = str(value).strip().lower()
    if key in symbols:
        return symbols[key]
    try:
        return int(key, 0)
    except ValueError:
        raise InvalidConfig(f"unknown {arch.value} AP code: {value!r}")


@dataclass(frozen=True)
class MpuRegion:
    number: int
    base: int
    limit: int  # inclusive
    ap: int
    xn: bool = False
    subregion_disable: int = 0
    enabled: bool = True
    arch: MpuArch = MpuArch.V7M
    pxn: bool = False

    @classmethod
    def v7m(cls, number: int, base: int, size: int, ap: int, xn: bool = False,
            subregion_disable: int = 0, enabled: bool = True) -> "MpuRegion":
        return cls(number, base, base + size - 1, ap, xn, subregion_disable, enabled, MpuArch.V7M)

    @classmethod
    def v8m(cls, number: int, base: int, limit: int, ap: int, xn: bool = False,
            pxn: bool = False, enabled: bool = True) -> "MpuRegion":
        return cls(number, base, limit, ap, xn, 0, enabled, MpuArch.V8M, pxn)

    @property
    def size(self) -> int:
        return self.limit - self.base + 1

    def validate(self) -> None:
        if self.ap not in AP_TABLES[self.arch]:
            raise InvalidConfig(f"region {self.number}: AP code {self.ap:#05b} is not defined for {self.arch.value}")
        if self.arch is MpuArch.V7M:
            size = self.size
            if size < MIN_REGION_SIZE or size & (size - 1):
                raise InvalidConfig(f"region {self.number}: size {size:#x} is not a power of two >= 32")
            if self.base % size:
                raise InvalidConfig(f"region {self.number}: base 0x{self.base:08x} not aligned to size {size:#x}")
            if self.subregion_disable and size < SUBREGION_MIN_SIZE:
                raise InvalidConfig(f"region {self.number}: subregions need a size of at least 256 bytes")
        else:
            if self.base % 32 or (self.limit + 1) % 32 or self.limit < self.base:
                raise InvalidConfig(f"region {self.number}: base/limit must be 32-byte granular")
            if self.subregion_disable:
                raise InvalidConfig(f"region {self.number}: v8m regions have no subregions")

    def covers(self, addr: int) -> bool:
        return self.base <= addr <= self.limit

    def matches(self, addr: int) -> bool:
        """Covers ``addr`` and the containing subregion is not disabled."""
        if not self.enabled or not self.covers(addr):
            return False
        if self.subregion_disable:
            subregion = (addr - self.base) // (self.size // 8)
            return not self.subregion_disable & (1 << subregion)
        return True

    def subregion_bounds(self):
        if not self.subregion_disable:
            return ()
        step = self.size // 8
        return tuple(self.base + step * i for i in range(1, 8))

    def rights(self, priv: Privilege) -> str:
        privileged, unprivileged = AP_TABLES[self.arch][self.ap]
        return privileged if priv is Privilege.PRIVILEGED else unprivileged

    def overlaps(self, other: "MpuRegion") -> bool:
        return self.base <= other.limit and other.base <= self.limit


@dataclass(frozen=True)
class MpuConfig:
    regions: Tuple[MpuRegion, ...] = ()
    enable: bool = False
    privileged_default: bool = False
    max_regions: int = 8
    pxn_supported: bool = False
    arch: MpuArch = MpuArch.V7M
    hfnmi_enable: bool = False

    def __post_init__(self):
        if len(self.regions) > self.max_regions:
            raise InvalidConfig(f"{len(self.regions)} regions exceed the maximum of {self.max_regions}")
        numbers = [r.number for r in self.regions]
        if len(set(numbers)) != len(numbers):
            raise InvalidConfig("duplicate region numbers")
        for region in self.regions:
            if not 0 <= region.number < self.max_regions:
                raise InvalidConfig(f"region number {region.number} out of range")
            if region.arch is not self.arch:
                raise InvalidConfig(f"region {region.number} is {region.arch.value}, config is {self.arch.value}")
            if region.enabled:
                region.validate()
        if self.arch is MpuArch.V8M:
            active = [r for r in self.regions if r.enabled]
            for i, a in enumerate(active):
                for b in active[i + 1:]:
                    if a.overlaps(b):
                        raise InvalidConfig(f"v8m regions {a.number} and {b.number} overlap")

    def region(self, number: int) -> Optional[MpuRegion]:
        for region in self.regions:
            if region.number == number:
                return region
        return None

    def match(self, addr: int) -> Optional[MpuRegion]:
        """Highest-numbered enabled region matching ``addr``."""
        best = None
        for region in self.regions:
            if region.matches(addr) and (best is None or region.number > best.number):
                best = region
        return best


def _background(memory_map: MemoryMap, addr: int, access: Access) -> bool:
    if access is Access.EXECUTE:
        return not memory_map.is_xn(addr)
    return True


def eval_mpu_access(cfg: MpuConfig, memory_map: Optional[MemoryMap], addr: int,
                    priv: Privilege, access: Access) -> Decision:
    memory_map = memory_map or default_memory_map()
    priv, access = Privilege(priv), Access(access)

    if not cfg.enable:
        return Decision.of(_background(memory_map, addr, access))

    region = cfg.match(addr)
    if region is None:
        if priv is Privilege.PRIVILEGED and cfg.privileged_default:
            return Decision.of(_background(memory_map, addr, access))
        return Decision.DENY

    rights = region.rights(priv)
    if access is Access.READ:
        return Decision.of("r" in rights)
    if access is Access.WRITE:
        return Decision.of("w" in rights)
    if "r" not in rights or region.xn or memory_map.is_xn(addr):
        return Decision.DENY
    if priv is Privilege.PRIVILEGED and cfg.pxn_supported and region.pxn:
        return Decision.DENY
    return Decision.ALLOW
