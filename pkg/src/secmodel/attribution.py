"""
Security attribution (TrustZone for Armv8-M).

The IDAU and the SAU each label an address; the more secure of the two
labels wins.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence, Tuple

from .errors import InvalidConfig

MAX_SAU_REGIONS = 8


class SecurityAttr(IntEnum):
    NON_SECURE = 0
    NSC = 1
    SECURE = 2

    @classmethod
    def parse(cls, value) -> "SecurityAttr":
        if isinstance(value, SecurityAttr):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"nonsecure": cls.NON_SECURE, "ns": cls.NON_SECURE, "nsc": cls.NSC,
                   "nonsecurecallable": cls.NSC, "secure": cls.SECURE, "s": cls.SECURE}
        if key not in aliases:
            raise InvalidConfig(f"unknown security attribute: {value!r}")
        return aliases[key]

    @property
    def label(self) -> str:
        return {0: "NonSecure", 1: "NSC", 2: "Secure"}[self.value]


@dataclass(frozen=True)
class AttributionRegion:
    start: int
    end: int  # inclusive
    attr: SecurityAttr

    def __contains__(self, addr: int) -> bool:
        return self.start <= addr <= self.end


def _check_unit(regions: Sequence[AttributionRegion], unit: str) -> None:
    for region in regions:
        if region.end < region.start:
            raise InvalidConfig(f"{unit} region 0x{region.start:08x}-0x{region.end:08x} is empty")
    ordered = sorted(regions, key=lambda r: r.start)
    for a, b in zip(ordered, ordered[1:]):
        if b.start <= a.end:
            raise InvalidConfig(f"{unit} regions at 0x{a.start:08x} and 0x{b.start:08x} overlap")


@dataclass(frozen=True)
class AttributionConfig:
    idau_regions: Tuple[AttributionRegion, ...] = ()
    sau_regions: Tuple[AttributionRegion, ...] = ()
    sau_enabled: bool = True
    # SAU_CTRL.ALLNS: with the SAU disabled, mark everything non-secure
    all_ns: bool = False

    def __post_init__(self):
        if len(self.sau_regions) > MAX_SAU_REGIONS:
            raise InvalidConfig(f"{len(self.sau_regions)} SAU regions exceed the maximum of {MAX_SAU_REGIONS}")
        _check_unit(self.idau_regions, "IDAU")
        _check_unit(self.sau_regions, "SAU")


def _lookup(regions: Sequence[AttributionRegion], addr: int) -> Optional[SecurityAttr]:
    for region in regions:
        if addr in region:
            return region.attr
    return None


def idau_attribution(cfg: AttributionConfig, addr: int) -> SecurityAttr:
    attr = _lookup(cfg.idau_regions, addr)
    return SecurityAttr.NON_SECURE if attr is None else attr


def sau_attribution(cfg: AttributionConfig, addr: int) -> SecurityAttr:
    if not cfg.sau_enabled:
        return SecurityAttr.NON_SECURE if cfg.all_ns else SecurityAttr.SECURE
    attr = _lookup(cfg.sau_regions, addr)
    return SecurityAttr.SECURE if attr is None else attr


def resolve_attribution(cfg: AttributionConfig, addr: int) -> SecurityAttr:
    return max(idau_attribution(cfg, addr), sau_attribution(cfg, addr))
