"""Memory access control (MPU, vendor sMPU) and readback protection."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from cfg.constprop import store_target
from cfg.flow import ControlFlow
from config.profiles import VendorProfile
from image.cores import core_features, mpu_arch
from ingest.model import FirmwareImage
from secmodel.audit import audit_mpu_config
from secmodel.errors import ModelError
from secmodel.reconstruct import MPU_CTRL, in_mpu_window, in_ns_alias_window, reconstruct_mpu_config

from .model import Evidence, Feature, Finding, Verdict, indeterminate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StoreSite:
    address: int          # instruction address
    target: int           # resolved store address
    value: Optional[int]


def resolved_stores(flow: ControlFlow) -> List[StoreSite]:
    """Every STR/STRT whose target address is a known constant, in address order."""
    sites = []
    for instr in flow.index:
        resolved = store_target(flow.index, instr, flow.const_window)
        if resolved is not None:
            sites.append(StoreSite(instr.addr, resolved[0], resolved[1]))
    return sites


def _log_entry(site: StoreSite) -> dict:
    return {
        "site": f"0x{site.address:08x}",
        "address": f"0x{site.target:08x}",
        "value": f"0x{site.value:08x}" if site.value is not None else None,
    }


def _audit(writes: List[StoreSite], profile: VendorProfile) -> dict:
    if any(w.value is None for w in writes):
        return {"reconstructed": False, "reason": "unresolved write values"}
    core = core_features(profile.core)
    try:
        cfg = reconstruct_mpu_config(
            [(w.target, w.value) for w in writes],
            arch=mpu_arch(profile.core),
            max_regions=core.max_mpu_regions if core and core.max_mpu_regions else None,
            pxn_supported=bool(core and core.pxn),
        )
    except ModelError as e:
        logger.info(f"MPU write log does not reconstruct: {e}")
        return {"reconstructed": False, "reason": str(e)}
    return {
        "reconstructed": True,
        "enabled": cfg.enable,
        "regions": len([r for r in cfg.regions if r.enabled]),
        "issues": [issue.kind.value for issue in audit_mpu_config(cfg)],
    }


def detect_mpu_usage(flow: ControlFlow, profile: VendorProfile) -> Tuple[Finding, Finding]:
    """(architectural MPU finding, vendor sMPU finding)."""
    stores = resolved_stores(flow)
    mpu_writes = [s for s in stores if in_mpu_window(s.target) or in_ns_alias_window(s.target)]
    return _mpu_finding(mpu_writes, profile), _smpu_finding(stores, profile)


def _mpu_finding(writes: List[StoreSite], profile: VendorProfile) -> Finding:
    detail = {"write_log": [_log_entry(w) for w in writes], "arch": mpu_arch(profile.core)}
    if not writes:
        return Finding(Feature.MPU, Verdict.ABSENT, (), detail)

    detail["audit"] = _audit(writes, profile)
    ctrl = [w for w in writes if w.target == MPU_CTRL]
    # an unresolved CTRL value counts as an enable; only a known clear ENABLE bit blocks
    enabling = [w for w in ctrl if w.value is None or w.value & 1]
    if enabling:
        evidence = tuple(
            Evidence(w.address, "MPU_CTRL <- ?" if w.value is None else f"MPU_CTRL <- {w.value:#x}")
            for w in enabling
        )
        return Finding(Feature.MPU, Verdict.PRESENT, evidence, detail)

    # registers touched but never enabled
    evidence = tuple(
        Evidence(w.address, f"store to 0x{w.target:08x}" + (f" <- {w.value:#x}" if w.value is not None else ""))
        for w in writes
    )
    return Finding(Feature.MPU, Verdict.INDETERMINATE, evidence, detail)


def _smpu_finding(stores: List[StoreSite], profile: VendorProfile) -> Finding:
    if not profile.has_smpu:
        return indeterminate(Feature.SMPU, f"profile {profile.id} declares no sMPU", applicable=False)
    writes = [s for s in stores if s.target in profile.smpu_mmio_addresses]
    detail = {"write_log": [_log_entry(w) for w in writes]}
    if not writes:
        return Finding(Feature.SMPU, Verdict.ABSENT, (), detail)
    evidence = tuple(Evidence(w.address, f"sMPU register 0x{w.target:08x}") for w in writes)
    return Finding(Feature.SMPU, Verdict.PRESENT, evidence, detail)


def detect_readback_protection(image: FirmwareImage, profile: VendorProfile) -> Finding:
    config = profile.readback
    if config is None:
        return indeterminate(Feature.READBACK_PROTECTION, f"profile {profile.id} declares no readback word",
                             applicable=False)
    word = image.read_u32(config.address)
    if word is None:
        return indeterminate(Feature.READBACK_PROTECTION,
                             f"no configuration segment covers 0x{config.address:08x}")
    detail = {"address": f"0x{config.address:08x}", "word": f"0x{word:08x}"}
    evidence = (Evidence(config.address, f"readback word {word:#010x}"),)
    verdict = Verdict.PRESENT if config.is_enabled(word) else Verdict.ABSENT
    return Finding(Feature.READBACK_PROTECTION, verdict, evidence, detail)
