"""Test-target (TT/TTT/TTA/TTAT) queries over the MPU and attribution models."""

from dataclasses import dataclass
from typing import Optional

from image.memory_map import MemoryMap

from .attribution import AttributionConfig, SecurityAttr, resolve_attribution
from .context import SecurityContext, SecurityState
from .mpu import Access, Decision, MpuConfig, Privilege, eval_mpu_access


@dataclass(frozen=True)
class Permissions:
    read_ok: bool
    write_ok: bool


@dataclass(frozen=True)
class TTResult:
    attribution: Optional[SecurityAttr]
    privileged: Permissions
    unprivileged: Permissions
    region: Optional[int] = None
    masked: bool = False

    @property
    def read_ok(self) -> bool:
        return self.privileged.read_ok and self.unprivileged.read_ok

    @property
    def write_ok(self) -> bool:
        return self.privileged.write_ok and self.unprivileged.write_ok


_NO_ACCESS = Permissions(False, False)


def _permissions(cfg: MpuConfig, memory_map: Optional[MemoryMap], addr: int, priv: Privilege) -> Permissions:
    return Permissions(
        read_ok=eval_mpu_access(cfg, memory_map, addr, priv, Access.READ) is Decision.ALLOW,
        write_ok=eval_mpu_access(cfg, memory_map, addr, priv, Access.WRITE) is Decision.ALLOW,
    )


def tt_query(ctx: SecurityContext, addr: int, mpu_secure: MpuConfig, mpu_nonsecure: MpuConfig,
             attr_cfg: AttributionConfig, alternate: bool = False,
             memory_map: Optional[MemoryMap] = None) -> TTResult:
    """
    Query ``addr`` from ``ctx``. The MPU bank follows the caller's
    security state; ``alternate`` (TTA) selects the non-secure bank from
    the secure state. Non-secure callers learn nothing about addresses
    that are not NonSecure.
    """
    attribution = resolve_attribution(attr_cfg, addr)
    if ctx.state is SecurityState.NON_SECURE and attribution is not SecurityAttr.NON_SECURE:
        return TTResult(attribution=None, privileged=_NO_ACCESS, unprivileged=_NO_ACCESS, masked=True)

    use_secure = ctx.state is SecurityState.SECURE and not alternate
    bank = mpu_secure if use_secure else mpu_nonsecure
    region = bank.match(addr) if bank.enable else None
    return TTResult(
        attribution=attribution,
        privileged=_permissions(bank, memory_map, addr, Privilege.PRIVILEGED),
        unprivileged=_permissions(bank, memory_map, addr, Privilege.UNPRIVILEGED),
        region=region.number if region is not None else None,
    )
